#include "vulnfwd/json_io.hpp"

#include "helpers.hpp"
#include "vulnfwd/analytic.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace vulnfwd;
using nlohmann::json;

namespace {

const char* kBaselineTatm = R"({
  "market": {"s": 1.0, "r": 0.04, "f": 0.06, "q": 0.055, "sigma": 0.30,
             "h_s": 0.05, "h1": 0.055, "h2": 0.055, "r1": 0.07, "r2": 0.07,
             "lambda1": 0.01, "lambda2": 0.01, "kappa": 0.0, "mu": 0.04},
  "policy": {"alpha": 0.5},
  "contract": {"strike": "tatm", "expiry": 5.0, "valuation_time": 0.0}
})";

std::string atmrf_config() {
    std::string text = kBaselineTatm;
    const auto pos = text.find("\"tatm\"");
    return text.replace(pos, 6, "\"atmrf\"");
}

struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(VULNFWD_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.stdout_text.append(buf, n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path.string();
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("baseline parses; tatm strike rule resolves") {
        const RunConfig cfg = parse_config_text(kBaselineTatm);
        CHECK(cfg.market.sigma == 0.30);
        CHECK(cfg.policy.alpha_s == 0.0);
        CHECK(cfg.policy.alpha1 == 0.5);
        CHECK(cfg.strike_rule == StrikeRule::tatm);
        CHECK(cfg.contract.strike == doctest::Approx(std::exp(-0.025)).epsilon(1e-14));
    }
    SUBCASE("atmrf strike rule") {
        const RunConfig cfg = parse_config_text(atmrf_config());
        CHECK(cfg.contract.strike == doctest::Approx(std::exp(0.2)).epsilon(1e-14));
    }
    SUBCASE("mu defaults to the deposit rate") {
        std::string text = kBaselineTatm;
        const auto pos = text.find(", \"mu\": 0.04");
        text.erase(pos, std::string(", \"mu\": 0.04").size());
        const RunConfig cfg = parse_config_text(text);
        CHECK(cfg.market.mu == cfg.market.r);
    }
    SUBCASE("explicit policy triple") {
        std::string text = kBaselineTatm;
        const auto pos = text.find("{\"alpha\": 0.5}");
        text.replace(pos, std::string("{\"alpha\": 0.5}").size(),
                     "{\"alpha_s\": 0.0, \"alpha1\": 0.3, \"alpha2\": 0.7}");
        const RunConfig cfg = parse_config_text(text);
        CHECK(cfg.policy.alpha1 == 0.3);
        CHECK(cfg.policy.is_linearizing(0.0));
    }
    SUBCASE("bond expiries are accepted but flagged unused") {
        std::string text = kBaselineTatm;
        const auto pos = text.find("\"mu\": 0.04");
        std::string patched = text;
        patched.replace(pos, std::string("\"mu\": 0.04").size(), "\"mu\": 0.04, \"t1\": 6.0");
        const RunConfig cfg = parse_config_text(patched);
        REQUIRE(cfg.warnings.size() == 1);
        CHECK(cfg.warnings[0].find("t1/t2") != std::string::npos);
    }
    SUBCASE("malformed inputs throw invalid_argument") {
        CHECK_THROWS_AS(parse_config_text("{not json"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config_text("{}"), std::invalid_argument);

        std::string missing = kBaselineTatm;
        missing.replace(missing.find("\"sigma\": 0.30,"), 15, "");
        CHECK_THROWS_AS(parse_config_text(missing), std::invalid_argument);

        std::string typo = kBaselineTatm;
        typo.replace(typo.find("\"sigma\""), 7, "\"sigm0\"");
        CHECK_THROWS_AS(parse_config_text(typo), std::invalid_argument);

        std::string bad_rule = kBaselineTatm;
        bad_rule.replace(bad_rule.find("\"tatm\""), 6, "\"atm\"");
        CHECK_THROWS_AS(parse_config_text(bad_rule), std::invalid_argument);
    }
}

TEST_CASE("config echo round-trips to an equal config") {
    const RunConfig cfg = parse_config_text(kBaselineTatm);
    const std::string echoed = config_to_json_text(cfg);
    const RunConfig back = parse_config_text(echoed);
    CHECK(back == cfg);
    // and the echo is stable under a second round trip
    CHECK(config_to_json_text(back) == echoed);
}

TEST_CASE("cli: price") {
    const std::string tatm = write_temp("vulnfwd_tatm.json", kBaselineTatm);
    const std::string atmrf = write_temp("vulnfwd_atmrf.json", atmrf_config());

    SUBCASE("baseline price in yearly basis points") {
        const CliResult res = run_cli("price --config " + tatm);
        REQUIRE(res.exit_code == 0);
        const json out = json::parse(res.stdout_text);
        CHECK(out.at("method") == "quadrature");
        CHECK(std::fabs(out.at("bps_total").get<double>() - 17.74) <= 0.25);
        CHECK(std::fabs(out.at("bps_per_year").get<double>() - 3.55) <= 0.05);
        CHECK(out.at("no_arb_violations").empty());
        // config echo reparses
        const RunConfig echoed = parse_config_text(out.at("config").dump());
        CHECK(echoed == parse_config_text(kBaselineTatm));
    }
    SUBCASE("byte-identical output for identical config") {
        const CliResult a = run_cli("price --config " + tatm);
        const CliResult b = run_cli("price --config " + tatm);
        CHECK(a.stdout_text == b.stdout_text);
    }
    SUBCASE("atm and approx agree at the ATM risk-free strike") {
        const CliResult atm = run_cli("price --config " + atmrf + " --method atm");
        const CliResult approx = run_cli("price --config " + atmrf + " --method approx");
        REQUIRE(atm.exit_code == 0);
        REQUIRE(approx.exit_code == 0);
        const double va = json::parse(atm.stdout_text).at("value").get<double>();
        const double vx = json::parse(approx.stdout_text).at("value").get<double>();
        CHECK(std::fabs(va - vx) <= 1e-12 * std::max(1.0, std::fabs(va)));
    }
    SUBCASE("--verify reports the quadrature cross-check") {
        const CliResult res = run_cli("price --config " + atmrf + " --method atm --verify");
        REQUIRE(res.exit_code == 0);
        const json out = json::parse(res.stdout_text);
        CHECK(out.at("cross_check").at("method_b") == "quadrature");
        CHECK(out.at("cross_check").at("abs_diff_over_notional").get<double>() <= 1e-9);
    }
    SUBCASE("atm method on a non-ATM strike is an input error") {
        const CliResult res = run_cli("price --config " + tatm + " --method atm");
        CHECK(res.exit_code == 2);
    }
    SUBCASE("malformed config exits 2") {
        const std::string broken = write_temp("vulnfwd_broken.json", "{\"market\": 3}");
        CHECK(run_cli("price --config " + broken).exit_code == 2);
        CHECK(run_cli("price --config /nonexistent/cfg.json").exit_code == 2);
    }
}

TEST_CASE("cli: sweep") {
    const std::string tatm = write_temp("vulnfwd_tatm.json", kBaselineTatm);

    SUBCASE("default funding-rate sweep has 61 rows and hits the baseline") {
        const CliResult res = run_cli("sweep --config " + tatm + " --param f --mode ctm");
        REQUIRE(res.exit_code == 0);
        std::size_t lines = 0;
        for (std::size_t pos = 0; (pos = res.stdout_text.find("\r\n", pos)) != std::string::npos;
             pos += 2)
            ++lines;
        CHECK(lines == 62);  // header + 61 rows
        CHECK(res.stdout_text.find("f,value_bps_per_year") == 0);
        CHECK(res.stdout_text.find("0.06,3.5479") != std::string::npos);
    }
    SUBCASE("kappa sweep spans the documented range") {
        const CliResult res =
            run_cli("sweep --config " + tatm + " --param kappa --grid \"-0.3:0:31\"");
        REQUIRE(res.exit_code == 0);
        std::size_t lines = 0;
        for (std::size_t pos = 0; (pos = res.stdout_text.find("\r\n", pos)) != std::string::npos;
             pos += 2)
            ++lines;
        CHECK(lines == 32);
    }
    SUBCASE("degenerate grid exits 2") {
        CHECK(run_cli("sweep --config " + tatm + " --param f --grid 0:0.15:0").exit_code == 2);
        CHECK(run_cli("sweep --config " + tatm + " --param f --grid 0:0:5").exit_code == 2);
        CHECK(run_cli("sweep --config " + tatm + " --param nope").exit_code == 2);
    }
    SUBCASE("joint grid emits both axes") {
        const CliResult res = run_cli("sweep --config " + tatm +
                                      " --param f --param2 sigma --grid 0.04:0.08:3 "
                                      "--grid2 0.2:0.4:3");
        REQUIRE(res.exit_code == 0);
        CHECK(res.stdout_text.find("f,sigma,value_bps_per_year") == 0);
        std::size_t lines = 0;
        for (std::size_t pos = 0; (pos = res.stdout_text.find("\r\n", pos)) != std::string::npos;
             pos += 2)
            ++lines;
        CHECK(lines == 10);  // header + 9 cells
    }
}

TEST_CASE("cli: verify, bounds, hedge, correlation") {
    const std::string tatm = write_temp("vulnfwd_tatm.json", kBaselineTatm);

    SUBCASE("verify passes on the baseline with a modest path count") {
        const CliResult res = run_cli("verify --config " + tatm + " --paths 20000 --seed 5");
        REQUIRE(res.exit_code == 0);
        const json out = json::parse(res.stdout_text);
        CHECK(out.at("pass").get<bool>());
        CHECK(out.at("checks").size() >= 3);
    }
    SUBCASE("an unreachable PDE tolerance surfaces GridTooCoarse and exits 4") {
        const CliResult res =
            run_cli("verify --config " + tatm + " --paths 2000 --seed 5 --tol 1e-8");
        CHECK(res.exit_code == 4);
        CHECK(res.stdout_text.find("GridTooCoarse") != std::string::npos);
    }
    SUBCASE("bounds reports a nonnegative band") {
        const CliResult res = run_cli("bounds --config " + tatm);
        REQUIRE(res.exit_code == 0);
        const json out = json::parse(res.stdout_text);
        CHECK(out.at("width").get<double>() > 0.0);
        CHECK(out.at("lower").get<double>() <= out.at("upper").get<double>());
    }
    SUBCASE("hedge satisfies its two structural identities") {
        const CliResult res = run_cli("hedge --config " + tatm);
        REQUIRE(res.exit_code == 0);
        const json out = json::parse(res.stdout_text);
        CHECK(out.at("checks").at("optimality_product").get<double>() == 0.0);
        CHECK(std::fabs(out.at("checks").at("funding_residual").get<double>()) <= 1e-8);
    }
    SUBCASE("correlation compares closed form and simulation") {
        std::string text = kBaselineTatm;
        text.replace(text.find("\"kappa\": 0.0"), 12, "\"kappa\": -0.4");
        const std::string cfg = write_temp("vulnfwd_corr.json", text);
        const CliResult res = run_cli("correlation --config " + cfg + " --paths 50000 --seed 9");
        REQUIRE(res.exit_code == 0);
        const json out = json::parse(res.stdout_text);
        CHECK(std::fabs(out.at("z_score").get<double>()) <= 4.0);
        CHECK(out.at("first_default").at("simultaneous").get<std::uint64_t>() == 0);
    }
    SUBCASE("--out writes the file instead of stdout") {
        const auto out_path = std::filesystem::temp_directory_path() / "vulnfwd_price_out.json";
        std::filesystem::remove(out_path);
        const CliResult res =
            run_cli("price --config " + tatm + " --out " + out_path.string());
        REQUIRE(res.exit_code == 0);
        CHECK(res.stdout_text.empty());
        std::ifstream in(out_path);
        REQUIRE(in.good());
        json parsed;
        in >> parsed;
        CHECK(parsed.contains("value"));
    }
}
