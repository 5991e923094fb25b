#include "vulnfwd/sweep.hpp"

#include "helpers.hpp"
#include "vulnfwd/analytic.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace vulnfwd;
using testutil::baseline_params;
using testutil::baseline_policy;
using testutil::kBaselineExpiry;

TEST_CASE("terminal at-the-money strike") {
    const MarketParams p = baseline_params();
    const FundingPolicy pol = baseline_policy();

    SUBCASE("baseline value") {
        CHECK(tatm_strike(p, pol, 5.0, 0.0) == doctest::Approx(std::exp(-0.025)).epsilon(1e-14));
    }
    SUBCASE("zeroes the terminal component by construction") {
        ForwardContract c;
        c.expiry = 5.0;
        c.strike = tatm_strike(p, pol, 5.0, 0.0);
        const ValuationResult res = price_general(c, p, pol);
        CHECK(std::fabs(res.terminal_component) <= 1e-12);
    }
    SUBCASE("coincides with the risk-free forward when mu_hat equals r") {
        MarketParams pr = p;
        pr.h_s = pr.r + pr.q;  // alpha_s = 0, so mu_hat = h_s - q = r
        const DerivedRates d = derive_rates(pr, pol);
        REQUIRE(d.mu_hat == doctest::Approx(pr.r).epsilon(1e-14));
        CHECK(tatm_strike(pr, pol, 5.0, 0.0) ==
              doctest::Approx(pr.s * std::exp(pr.r * 5.0)).epsilon(1e-12));
    }
}

TEST_CASE("risky stock forward") {
    const MarketParams p = baseline_params();
    const FundingPolicy pol = baseline_policy();

    CHECK(risky_stock_forward(p, pol, 1.3, 0.0) == 1.3);

    SUBCASE("kappa = 0 drift reduces to h_s - q") {
        CHECK(risky_stock_forward(p, pol, 1.0, 2.0) ==
              doctest::Approx(std::exp((p.h_s - p.q) * 2.0)).epsilon(1e-14));
    }
    SUBCASE("kappa = -10%: drift decomposition identity at the baseline") {
        MarketParams pk = p;
        pk.kappa = -0.10;
        const FundingPolicy polk = baseline_policy(pk.kappa);
        const DerivedRates d = derive_rates(pk, polk);
        const double alpha = polk.alpha1;
        const double decomposed = (1.0 + pk.kappa) * pk.h_s - pk.q +
                                  pk.kappa * ((alpha * pk.h1 + (1.0 - alpha) * pk.h2) -
                                              (pk.r1 + pk.r2));
        CHECK(d.mu_hat == doctest::Approx(decomposed).epsilon(1e-14));
        CHECK(risky_stock_forward(pk, polk, 1.0, 5.0) ==
              doctest::Approx(std::exp(decomposed * 5.0)).epsilon(1e-12));
    }
}

TEST_CASE("spec validation") {
    SweepSpec spec;
    spec.parameter = "f";

    SUBCASE("empty grid") {
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("non-monotone grid") {
        spec.grid = {0.0, 0.1, 0.05};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
        spec.grid = {0.0, 0.0};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("unknown parameter") {
        spec.parameter = "vega";
        spec.grid = {0.0, 1.0};
        CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    }
    SUBCASE("grid axes must differ and run CTM") {
        GridSpec g;
        g.axis1.parameter = "f";
        g.axis1.grid = {0.0, 0.1};
        g.axis2 = g.axis1;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
        g.axis2.parameter = "sigma";
        CHECK_NOTHROW(g.validate());
        g.axis2.mode = SweepMode::cts;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    }
}

TEST_CASE("single-parameter sweeps") {
    const MarketParams p = baseline_params();
    const FundingPolicy pol = baseline_policy();

    SUBCASE("CTM funding sweep: baseline point, monotonicity, CTM invariance") {
        SweepSpec spec;
        spec.parameter = "f";
        spec.grid = linspace(0.0, 0.15, 61);
        spec.mode = SweepMode::ctm;
        const auto rows = run_sweep(spec, p, pol, kBaselineExpiry);
        REQUIRE(rows.size() == 61);

        // f = 6% sits on the grid; that row is the paper baseline
        const SweepRow& base_row = rows[24];
        REQUIRE(base_row.value1 == doctest::Approx(0.06).epsilon(1e-12));
        CHECK(base_row.bps_per_year() == doctest::Approx(3.55).epsilon(0.015));

        double prev = std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            REQUIRE_FALSE(row.failed);
            CHECK(std::fabs(row.terminal) <= 1e-10);  // strike recomputed per point
            CHECK(row.value < prev);                  // strictly decreasing in f
            prev = row.value;
        }
        // rows with f below the repo rates violate no-arbitrage yet still price
        CHECK_FALSE(rows[0].no_arb_violations.empty());
        CHECK(rows[24].no_arb_violations.empty());
    }
    SUBCASE("CTS baseline with kappa = -10% reproduces the paper value") {
        MarketParams pk = p;
        pk.kappa = -0.10;
        const FundingPolicy polk = baseline_policy(pk.kappa);
        SweepSpec spec;
        spec.parameter = "r1";
        spec.grid = linspace(0.0, 0.15, 61);  // r1 = 7% is index 28
        spec.mode = SweepMode::cts;
        const auto rows = run_sweep(spec, pk, polk, kBaselineExpiry);
        const SweepRow& base_row = rows[28];
        REQUIRE(base_row.value1 == doctest::Approx(0.07).epsilon(1e-12));
        CHECK(base_row.bps_per_year() == doctest::Approx(-24.25).epsilon(0.01));
    }
    SUBCASE("CTS and CTM agree at the base point") {
        for (SweepMode mode : {SweepMode::ctm, SweepMode::cts}) {
            SweepSpec spec;
            spec.parameter = "sigma";
            spec.grid = {0.30};  // the base value itself
            spec.mode = mode;
            const auto rows = run_sweep(spec, p, pol, kBaselineExpiry);
            CHECK(rows[0].bps_per_year() == doctest::Approx(3.5479).epsilon(1e-4));
        }
    }
    SUBCASE("sweeping kappa keeps the policy linearizing") {
        SweepSpec spec;
        spec.parameter = "kappa";
        spec.grid = linspace(-0.30, 0.0, 31);
        const auto rows = run_sweep(spec, p, pol, kBaselineExpiry);
        for (const auto& row : rows) REQUIRE_FALSE(row.failed);
        // the kappa panel covers roughly a 90 bps/year range
        const double range = rows.back().bps_per_year() - rows.front().bps_per_year();
        CHECK(std::fabs(range) > 50.0);
        CHECK(std::fabs(range) < 150.0);
    }
    SUBCASE("rows that cannot price are marked failed, sweep continues") {
        SweepSpec spec;
        spec.parameter = "sigma";
        spec.grid = {-0.1, 0.3};  // first point structurally invalid
        const auto rows = run_sweep(spec, p, pol, kBaselineExpiry);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].failed);
        CHECK_FALSE(rows[0].failure.empty());
        CHECK_FALSE(rows[1].failed);
    }
    SUBCASE("expiry sweep renormalizes per year") {
        SweepSpec spec;
        spec.parameter = "T";
        spec.grid = {1.0, 5.0};
        const auto rows = run_sweep(spec, p, pol, kBaselineExpiry);
        CHECK(rows[0].horizon == 1.0);
        CHECK(rows[1].horizon == 5.0);
        CHECK(rows[1].bps_per_year() == doctest::Approx(3.5479).epsilon(1e-3));
    }
}

TEST_CASE("joint grids") {
    const MarketParams p = baseline_params();
    const FundingPolicy pol = baseline_policy();

    SUBCASE("single cell equals the single-point sweep") {
        GridSpec g;
        g.axis1.parameter = "f";
        g.axis1.grid = {0.06};
        g.axis2.parameter = "sigma";
        g.axis2.grid = {0.30};
        const auto cells = run_grid(g, p, pol, kBaselineExpiry);
        REQUIRE(cells.size() == 1);
        CHECK(cells[0].bps_per_year() == doctest::Approx(3.5479).epsilon(1e-4));
        CHECK(cells[0].value2.has_value());
    }
    SUBCASE("f = r row is flat across volatility") {
        GridSpec g;
        g.axis1.parameter = "f";
        g.axis1.grid = {0.04};  // equal to the deposit rate: b = 0
        g.axis2.parameter = "sigma";
        g.axis2.grid = linspace(0.05, 0.80, 16);
        const auto cells = run_grid(g, p, pol, kBaselineExpiry);
        double lo = 1e300, hi = -1e300;
        for (const auto& cell : cells) {
            REQUIRE_FALSE(cell.failed);
            lo = std::min(lo, cell.bps_per_year());
            hi = std::max(hi, cell.bps_per_year());
        }
        CHECK(hi - lo <= 1.0);
    }
}

TEST_CASE("CSV output") {
    const MarketParams p = baseline_params();
    const FundingPolicy pol = baseline_policy();
    SweepSpec spec;
    spec.parameter = "f";
    spec.grid = {0.0, 0.06, 0.15};

    std::ostringstream os;
    const auto rows = run_sweep(spec, p, pol, kBaselineExpiry);
    write_sweep_csv(os, rows, "f", "", SweepMetric::bps_per_year);
    const std::string text = os.str();

    CHECK(text.rfind("f,value_bps_per_year,terminal_bps,put_recovery_bps,call_recovery_bps,"
                     "no_arb_violations\r\n",
                     0) == 0);
    // one header plus three data lines, CRLF-terminated
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = text.find("\r\n", pos)) != std::string::npos; pos += 2)
        ++lines;
    CHECK(lines == 4);
    // violation annotations survive into the last column
    CHECK(text.find("h_s <= f") != std::string::npos);

    SUBCASE("raw metric renames the value columns") {
        std::ostringstream raw;
        write_sweep_csv(raw, rows, "f", "", SweepMetric::raw);
        CHECK(raw.str().rfind("f,value,terminal,put_recovery,call_recovery,no_arb_violations\r\n",
                              0) == 0);
    }
    SUBCASE("fields containing commas are quoted") {
        std::vector<SweepRow> bad(1);
        bad[0].value1 = 1.0;
        bad[0].no_arb_violations = {"a,b"};
        std::ostringstream q;
        write_sweep_csv(q, bad, "f", "", SweepMetric::raw);
        CHECK(q.str().find("\"a,b\"") != std::string::npos);
    }
}

TEST_CASE("default ranges cover the baseline table") {
    CHECK(default_sweep_range("f").value() == std::pair<double, double>{0.0, 0.15});
    CHECK(default_sweep_range("kappa").value() == std::pair<double, double>{-0.30, 0.0});
    CHECK(default_sweep_range("T").value() == std::pair<double, double>{1.0, 30.0});
    CHECK_FALSE(default_sweep_range("mu").has_value());
}
