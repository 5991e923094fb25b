#include "vulnfwd/json_io.hpp"

#include "vulnfwd/analytic.hpp"
#include "vulnfwd/sweep.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <stdexcept>

namespace vulnfwd {

namespace {

using nlohmann::json;

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key))
        throw std::invalid_argument(where + " is missing required key \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument(where + " key \"" + key + "\" must be a number");
    return v.get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw std::invalid_argument(where + " has unknown key \"" + it.key() + "\"");
    }
}

MarketParams parse_market(const json& obj, std::vector<std::string>& warnings) {
    if (!obj.is_object()) throw std::invalid_argument("\"market\" must be an object");
    const std::set<std::string> allowed = {"s",  "r",  "f",  "q",  "sigma",   "h_s",
                                           "h1", "h2", "r1", "r2", "lambda1", "lambda2",
                                           "kappa", "mu", "recovery1", "recovery2", "t1", "t2"};
    reject_unknown(obj, allowed, "\"market\"");

    MarketParams p;
    p.s = require_number(obj, "s", "\"market\"");
    p.r = require_number(obj, "r", "\"market\"");
    p.f = require_number(obj, "f", "\"market\"");
    p.q = require_number(obj, "q", "\"market\"");
    p.sigma = require_number(obj, "sigma", "\"market\"");
    p.h_s = require_number(obj, "h_s", "\"market\"");
    p.h1 = require_number(obj, "h1", "\"market\"");
    p.h2 = require_number(obj, "h2", "\"market\"");
    p.r1 = require_number(obj, "r1", "\"market\"");
    p.r2 = require_number(obj, "r2", "\"market\"");
    p.lambda1 = require_number(obj, "lambda1", "\"market\"");
    p.lambda2 = require_number(obj, "lambda2", "\"market\"");
    p.kappa = require_number(obj, "kappa", "\"market\"");
    // physical drift matters only to the P-measure simulator; no market
    // baseline exists for it, so default to the deposit rate
    p.mu = obj.contains("mu") ? require_number(obj, "mu", "\"market\"") : p.r;
    if (obj.contains("recovery1")) p.recovery1 = require_number(obj, "recovery1", "\"market\"");
    if (obj.contains("recovery2")) p.recovery2 = require_number(obj, "recovery2", "\"market\"");
    if (obj.contains("t1") || obj.contains("t2")) {
        warnings.push_back(
            "bond expiries t1/t2 accepted but unused: they enter no valuation formula");
    }
    p.validate();
    return p;
}

FundingPolicy parse_policy(const json& obj, double kappa) {
    if (!obj.is_object()) throw std::invalid_argument("\"policy\" must be an object");
    if (obj.contains("alpha")) {
        reject_unknown(obj, {"alpha"}, "\"policy\"");
        const double alpha = require_number(obj, "alpha", "\"policy\"");
        FundingPolicy p = FundingPolicy::linearizing(alpha, kappa);
        p.validate();
        return p;
    }
    reject_unknown(obj, {"alpha_s", "alpha1", "alpha2"}, "\"policy\"");
    FundingPolicy p;
    p.alpha_s = require_number(obj, "alpha_s", "\"policy\"");
    p.alpha1 = require_number(obj, "alpha1", "\"policy\"");
    p.alpha2 = require_number(obj, "alpha2", "\"policy\"");
    p.validate();
    return p;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
    const MarketParams &a = market, &b = other.market;
    return a.s == b.s && a.r == b.r && a.f == b.f && a.q == b.q && a.sigma == b.sigma &&
           a.h_s == b.h_s && a.h1 == b.h1 && a.h2 == b.h2 && a.r1 == b.r1 && a.r2 == b.r2 &&
           a.lambda1 == b.lambda1 && a.lambda2 == b.lambda2 && a.kappa == b.kappa &&
           a.mu == b.mu && policy.alpha_s == other.policy.alpha_s &&
           policy.alpha1 == other.policy.alpha1 && policy.alpha2 == other.policy.alpha2 &&
           contract.strike == other.contract.strike && contract.expiry == other.contract.expiry &&
           contract.valuation_time == other.contract.valuation_time;
}

RunConfig parse_config_text(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown(doc, {"market", "policy", "contract"}, "config");
    if (!doc.contains("market")) throw std::invalid_argument("config is missing \"market\"");
    if (!doc.contains("policy")) throw std::invalid_argument("config is missing \"policy\"");
    if (!doc.contains("contract")) throw std::invalid_argument("config is missing \"contract\"");

    RunConfig cfg;
    cfg.market = parse_market(doc.at("market"), cfg.warnings);
    cfg.policy = parse_policy(doc.at("policy"), cfg.market.kappa);

    const json& cobj = doc.at("contract");
    if (!cobj.is_object()) throw std::invalid_argument("\"contract\" must be an object");
    reject_unknown(cobj, {"strike", "expiry", "valuation_time"}, "\"contract\"");
    cfg.contract.expiry = require_number(cobj, "expiry", "\"contract\"");
    cfg.contract.valuation_time =
        cobj.contains("valuation_time") ? require_number(cobj, "valuation_time", "\"contract\"")
                                        : 0.0;
    if (!cobj.contains("strike"))
        throw std::invalid_argument("\"contract\" is missing required key \"strike\"");
    const json& strike = cobj.at("strike");
    if (strike.is_number()) {
        cfg.contract.strike = strike.get<double>();
        cfg.strike_rule = StrikeRule::explicit_value;
    } else if (strike.is_string()) {
        const std::string rule = strike.get<std::string>();
        if (rule == "tatm") {
            cfg.strike_rule = StrikeRule::tatm;
            cfg.contract.strike = tatm_strike(cfg.market, cfg.policy, cfg.contract.expiry,
                                              cfg.contract.valuation_time);
        } else if (rule == "atmrf") {
            cfg.strike_rule = StrikeRule::atmrf;
            ForwardContract tmp = cfg.contract;
            tmp.strike = 1.0;  // placeholder; atmrf_strike only reads the times
            cfg.contract.strike = atmrf_strike(tmp, cfg.market);
        } else {
            throw std::invalid_argument("\"strike\" must be a number, \"tatm\" or \"atmrf\"");
        }
    } else {
        throw std::invalid_argument("\"strike\" must be a number, \"tatm\" or \"atmrf\"");
    }
    cfg.contract.validate();
    return cfg;
}

std::string config_to_json_text(const RunConfig& cfg) {
    json doc;
    doc["market"] = {{"s", cfg.market.s},       {"r", cfg.market.r},
                     {"f", cfg.market.f},       {"q", cfg.market.q},
                     {"sigma", cfg.market.sigma}, {"h_s", cfg.market.h_s},
                     {"h1", cfg.market.h1},     {"h2", cfg.market.h2},
                     {"r1", cfg.market.r1},     {"r2", cfg.market.r2},
                     {"lambda1", cfg.market.lambda1}, {"lambda2", cfg.market.lambda2},
                     {"kappa", cfg.market.kappa}, {"mu", cfg.market.mu}};
    doc["policy"] = {{"alpha_s", cfg.policy.alpha_s},
                     {"alpha1", cfg.policy.alpha1},
                     {"alpha2", cfg.policy.alpha2}};
    doc["contract"] = {{"strike", cfg.contract.strike},
                       {"expiry", cfg.contract.expiry},
                       {"valuation_time", cfg.contract.valuation_time}};
    return doc.dump();
}

}  // namespace vulnfwd
