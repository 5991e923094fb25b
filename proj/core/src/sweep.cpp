#include "vulnfwd/sweep.hpp"

#include "vulnfwd/analytic.hpp"
#include "vulnfwd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace vulnfwd {

namespace {

struct Scenario {
    MarketParams params;
    FundingPolicy policy;
    double expiry;
};

void apply_parameter(Scenario& sc, const std::string& name, double value) {
    MarketParams& p = sc.params;
    if (name == "s") p.s = value;
    else if (name == "r") p.r = value;
    else if (name == "f") p.f = value;
    else if (name == "q") p.q = value;
    else if (name == "sigma") p.sigma = value;
    else if (name == "h_s") p.h_s = value;
    else if (name == "h1") p.h1 = value;
    else if (name == "h2") p.h2 = value;
    else if (name == "r1") p.r1 = value;
    else if (name == "r2") p.r2 = value;
    else if (name == "lambda1") p.lambda1 = value;
    else if (name == "lambda2") p.lambda2 = value;
    else if (name == "mu") p.mu = value;
    else if (name == "kappa") p.kappa = value;
    else if (name == "alpha") sc.policy = FundingPolicy::linearizing(value, p.kappa);
    else if (name == "T") sc.expiry = value;
    else throw std::invalid_argument("unknown sweep parameter: " + name);
    // keep the policy linearizing when the jump size moves
    if (name == "kappa") sc.policy = FundingPolicy::linearizing(sc.policy.alpha1, value);
}

SweepRow price_row(const Scenario& sc, std::optional<double> frozen_strike,
                   const QuadConfig& quad) {
    SweepRow row;
    row.spot = sc.params.s;
    row.horizon = sc.expiry;
    for (const auto& v : validate_no_arbitrage(sc.params)) row.no_arb_violations.push_back(v.condition);
    try {
        ForwardContract contract;
        contract.expiry = sc.expiry;
        contract.valuation_time = 0.0;
        contract.strike = frozen_strike ? *frozen_strike
                                        : tatm_strike(sc.params, sc.policy, sc.expiry, 0.0);
        const ValuationResult res = price_general(contract, sc.params, sc.policy, quad);
        row.value = res.value;
        row.terminal = res.terminal_component;
        row.put_recovery = res.put_recovery_component;
        row.call_recovery = res.call_recovery_component;
    } catch (const std::exception& e) {
        row.failed = true;
        row.failure = e.what();
    }
    return row;
}

void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
    if (grid.size() > 1) {
        const bool increasing = grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const bool step_up = grid[i] > grid[i - 1];
            if (step_up != increasing || grid[i] == grid[i - 1])
                throw std::invalid_argument("sweep grid must be strictly monotone");
        }
    }
}

char* fmt12(char* buf, std::size_t n, double v) {
    std::snprintf(buf, n, "%.12g", v);
    return buf;
}

// RFC 4180: quote a field when it holds a comma, quote, or newline.
std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

double tatm_strike(const MarketParams& params, const FundingPolicy& policy, double T, double t) {
    require_linearizing(params, policy);
    const DerivedRates d = derive_rates(params, policy);
    return params.s * std::exp(d.mu_hat * (T - t));
}

double risky_stock_forward(const MarketParams& params, const FundingPolicy& policy, double s,
                           double tau) {
    require_linearizing(params, policy);
    const DerivedRates d = derive_rates(params, policy);
    return s * std::exp(d.mu_hat * tau);
}

const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> names = {
        "s",  "r",  "f",  "q",  "sigma",   "h_s",     "h1",    "h2",
        "r1", "r2", "lambda1", "lambda2", "mu", "kappa", "alpha", "T"};
    return names;
}

std::optional<std::pair<double, double>> default_sweep_range(const std::string& parameter) {
    if (parameter == "T") return {{1.0, 30.0}};
    if (parameter == "q") return {{0.0, 0.15}};
    if (parameter == "sigma") return {{0.05, 0.80}};
    if (parameter == "r") return {{-0.03, 0.15}};
    if (parameter == "f") return {{0.0, 0.15}};
    if (parameter == "h_s" || parameter == "h1" || parameter == "h2") return {{0.0, 0.15}};
    if (parameter == "r1" || parameter == "r2") return {{0.0, 0.15}};
    if (parameter == "kappa") return {{-0.30, 0.0}};
    if (parameter == "alpha") return {{0.0, 1.0}};
    return std::nullopt;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("grid needs at least one point");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = lo + i * step;
    out[n - 1] = hi;
    return out;
}

void SweepSpec::validate() const {
    const auto& names = sweepable_parameters();
    if (std::find(names.begin(), names.end(), parameter) == names.end())
        throw std::invalid_argument("unknown sweep parameter: " + parameter);
    validate_grid(grid);
}

void GridSpec::validate() const {
    axis1.validate();
    axis2.validate();
    if (axis1.parameter == axis2.parameter)
        throw std::invalid_argument("grid axes must name distinct parameters");
    if (axis1.mode != SweepMode::ctm || axis2.mode != SweepMode::ctm)
        throw std::invalid_argument("joint grids run in CTM mode only");
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const MarketParams& base_params,
                                const FundingPolicy& base_policy, double contract_expiry,
                                const QuadConfig& quad) {
    spec.validate();
    base_params.validate();
    require_linearizing(base_params, base_policy);

    std::optional<double> frozen;
    if (spec.mode == SweepMode::cts)
        frozen = tatm_strike(base_params, base_policy, contract_expiry, 0.0);

    std::vector<SweepRow> rows(spec.grid.size());
    parallel_blocks(std::int64_t(spec.grid.size()), 1,
                    [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                        for (std::int64_t i = begin; i < end; ++i) {
                            Scenario sc{base_params, base_policy, contract_expiry};
                            apply_parameter(sc, spec.parameter, spec.grid[std::size_t(i)]);
                            rows[std::size_t(i)] = price_row(sc, frozen, quad);
                            rows[std::size_t(i)].value1 = spec.grid[std::size_t(i)];
                        }
                    });
    return rows;
}

std::vector<SweepRow> run_grid(const GridSpec& spec, const MarketParams& base_params,
                               const FundingPolicy& base_policy, double contract_expiry,
                               const QuadConfig& quad) {
    spec.validate();
    base_params.validate();
    require_linearizing(base_params, base_policy);

    const std::size_t n1 = spec.axis1.grid.size();
    const std::size_t n2 = spec.axis2.grid.size();
    std::vector<SweepRow> rows(n1 * n2);
    parallel_blocks(std::int64_t(n1 * n2), 4,
                    [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                        for (std::int64_t idx = begin; idx < end; ++idx) {
                            const std::size_t i = std::size_t(idx) / n2;
                            const std::size_t j = std::size_t(idx) % n2;
                            Scenario sc{base_params, base_policy, contract_expiry};
                            apply_parameter(sc, spec.axis1.parameter, spec.axis1.grid[i]);
                            apply_parameter(sc, spec.axis2.parameter, spec.axis2.grid[j]);
                            rows[std::size_t(idx)] = price_row(sc, std::nullopt, quad);
                            rows[std::size_t(idx)].value1 = spec.axis1.grid[i];
                            rows[std::size_t(idx)].value2 = spec.axis2.grid[j];
                        }
                    });
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& param1, const std::string& param2, SweepMetric metric) {
    const bool two = !param2.empty();
    const bool bps = (metric == SweepMetric::bps_per_year);
    os << csv_escape(param1);
    if (two) os << ',' << csv_escape(param2);
    if (bps)
        os << ",value_bps_per_year,terminal_bps,put_recovery_bps,call_recovery_bps";
    else
        os << ",value,terminal,put_recovery,call_recovery";
    os << ",no_arb_violations\r\n";

    char buf[64];
    for (const auto& row : rows) {
        os << fmt12(buf, sizeof(buf), row.value1);
        if (two) os << ',' << fmt12(buf, sizeof(buf), row.value2.value_or(0.0));
        if (row.failed) {
            os << ",,,,";
        } else {
            const double scale = bps ? 1e4 / (row.spot * row.horizon) : 1.0;
            os << ',' << fmt12(buf, sizeof(buf), row.value * scale);
            os << ',' << fmt12(buf, sizeof(buf), row.terminal * scale);
            os << ',' << fmt12(buf, sizeof(buf), row.put_recovery * scale);
            os << ',' << fmt12(buf, sizeof(buf), row.call_recovery * scale);
        }
        std::string note;
        for (std::size_t i = 0; i < row.no_arb_violations.size(); ++i) {
            if (i) note += "; ";
            note += row.no_arb_violations[i];
        }
        if (row.failed) {
            if (!note.empty()) note += "; ";
            note += "failed: " + row.failure;
        }
        os << ',' << csv_escape(note) << "\r\n";
    }
}

}  // namespace vulnfwd
