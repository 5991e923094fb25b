// vulnfwd: pricing and verification tool for vulnerable forward contracts
// under funding, credit and wrong-way risk. JSON config in, JSON/CSV out.

#include "vulnfwd/analytic.hpp"
#include "vulnfwd/errors.hpp"
#include "vulnfwd/json_io.hpp"
#include "vulnfwd/market.hpp"
#include "vulnfwd/mc.hpp"
#include "vulnfwd/pde.hpp"
#include "vulnfwd/sweep.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;
using namespace vulnfwd;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct CommonOptions {
    std::string config_path;
    std::string out_path;
};

RunConfig load_config(const CommonOptions& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + opts.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void emit(const CommonOptions& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + opts.out_path);
    out << text;
}

json violations_json(const MarketParams& params) {
    json arr = json::array();
    for (const auto& v : validate_no_arbitrage(params)) arr.push_back(v.describe());
    return arr;
}

json config_echo(const RunConfig& cfg) { return json::parse(config_to_json_text(cfg)); }

json result_json(const ValuationResult& res) {
    json j;
    j["method"] = method_name(res.method);
    j["value"] = res.value;
    j["bps_per_year"] = res.bps_per_year;
    j["components"] = {{"terminal", res.terminal_component},
                       {"put_recovery", res.put_recovery_component},
                       {"call_recovery", res.call_recovery_component}};
    if (res.method == Method::quadrature) j["quad_abs_error"] = res.quad_abs_error;
    return j;
}

ValuationResult price_by_method(const std::string& method, const RunConfig& cfg,
                                const QuadConfig& quad) {
    if (method == "quadrature") return price_general(cfg.contract, cfg.market, cfg.policy, quad);
    if (method == "atm") return price_atmrf(cfg.contract, cfg.market, cfg.policy);
    if (method == "approx") return price_approx(cfg.contract, cfg.market, cfg.policy);
    throw std::invalid_argument("unknown method: " + method);
}

int cmd_price(const CommonOptions& opts, const std::string& method, double tol, bool verify) {
    const RunConfig cfg = load_config(opts);
    QuadConfig quad;
    quad.abs_tol = tol;

    const ValuationResult res = price_by_method(method, cfg, quad);
    if (!std::isfinite(res.value)) throw QuadratureNonConvergence("non-finite value");

    json out = result_json(res);
    out["bps_total"] = res.bps_per_year * cfg.contract.tau();
    out["no_arb_violations"] = violations_json(cfg.market);
    out["config"] = config_echo(cfg);
    json warnings = json::array();
    for (const auto& w : cfg.warnings) warnings.push_back(w);
    if (res.out_of_domain)
        warnings.push_back("approximation used outside its validated moneyness range "
                           "m in [0.85, 1.15]");
    out["warnings"] = warnings;

    if (verify) {
        // cross-check the chosen formula against its closest alternative
        const ValuationResult ref =
            (method == "quadrature")
                ? (std::fabs(cfg.contract.strike / atmrf_strike(cfg.contract, cfg.market) - 1.0) <=
                           1e-12
                       ? price_atmrf(cfg.contract, cfg.market, cfg.policy)
                       : price_approx(cfg.contract, cfg.market, cfg.policy))
                : price_general(cfg.contract, cfg.market, cfg.policy, quad);
        out["cross_check"] = {{"method_a", method_name(res.method)},
                              {"method_b", method_name(ref.method)},
                              {"abs_diff_over_notional",
                               std::fabs(res.value - ref.value) / cfg.market.s}};
    }
    emit(opts, out.dump(2) + "\n");
    return kExitOk;
}

struct GridFlag {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    bool set = false;
};

GridFlag parse_grid_flag(const std::string& text) {
    GridFlag g;
    if (text.empty()) return g;
    const auto p1 = text.find(':');
    const auto p2 = text.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw std::invalid_argument("--grid must look like lo:hi:n");
    try {
        g.lo = std::stod(text.substr(0, p1));
        g.hi = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
        g.n = std::stoi(text.substr(p2 + 1));
    } catch (...) {
        throw std::invalid_argument("--grid must look like lo:hi:n with numeric fields");
    }
    if (g.n < 1) throw std::invalid_argument("--grid point count must be >= 1");
    g.set = true;
    return g;
}

std::vector<double> grid_for(const std::string& param, const GridFlag& flag) {
    if (flag.set) return linspace(flag.lo, flag.hi, flag.n);
    const auto range = default_sweep_range(param);
    if (!range)
        throw std::invalid_argument("parameter \"" + param +
                                    "\" has no default range; pass --grid lo:hi:n");
    return linspace(range->first, range->second, 61);
}

int cmd_sweep(const CommonOptions& opts, const std::string& param, const std::string& param2,
              const std::string& mode, const std::string& grid_text,
              const std::string& grid2_text, const std::string& metric_text, double tol) {
    const RunConfig cfg = load_config(opts);
    QuadConfig quad;
    quad.abs_tol = tol;

    const SweepMode mode_tag = (mode == "cts") ? SweepMode::cts : SweepMode::ctm;
    const SweepMetric metric =
        (metric_text == "raw") ? SweepMetric::raw : SweepMetric::bps_per_year;

    std::ostringstream csv;
    if (param2.empty()) {
        SweepSpec spec;
        spec.parameter = param;
        spec.grid = grid_for(param, parse_grid_flag(grid_text));
        spec.mode = mode_tag;
        spec.metric = metric;
        const auto rows = run_sweep(spec, cfg.market, cfg.policy, cfg.contract.expiry, quad);
        write_sweep_csv(csv, rows, param, "", metric);
    } else {
        if (mode_tag != SweepMode::ctm)
            throw std::invalid_argument("joint grids run in CTM mode only");
        GridSpec spec;
        spec.axis1.parameter = param;
        spec.axis1.grid = grid_for(param, parse_grid_flag(grid_text));
        spec.axis1.metric = metric;
        spec.axis2.parameter = param2;
        spec.axis2.grid = grid_for(param2, parse_grid_flag(grid2_text));
        spec.axis2.metric = metric;
        const auto rows = run_grid(spec, cfg.market, cfg.policy, cfg.contract.expiry, quad);
        write_sweep_csv(csv, rows, param, param2, metric);
    }
    emit(opts, csv.str());
    return kExitOk;
}

int cmd_verify(const CommonOptions& opts, std::uint64_t paths, std::uint64_t seed, double tol,
               const std::string& grid_text) {
    const RunConfig cfg = load_config(opts);
    const double years = cfg.contract.tau();

    const ValuationResult analytic = price_general(cfg.contract, cfg.market, cfg.policy, {});

    json checks = json::array();
    bool all_pass = true;
    auto add_check = [&](const std::string& name, bool pass, json detail) {
        detail["name"] = name;
        detail["pass"] = pass;
        checks.push_back(detail);
        all_pass = all_pass && pass;
    };

    // Monte Carlo agreement and trapezoid-refinement stability on one path set
    McConfig mc;
    mc.n_paths = paths;
    mc.seed = seed;
    mc.n_steps = std::max(2, 2 * int(std::lround(25.0 * years)));  // 50 steps/year, even
    const McStepRefinement ref = mc_price_qhat_step_check(cfg.contract, cfg.market, cfg.policy, mc);
    {
        const double err = std::fabs(ref.fine.mean - analytic.value);
        add_check("mc_vs_analytic", err <= 3.0 * ref.fine.std_error,
                  {{"mc_mean", ref.fine.mean},
                   {"mc_std_error", ref.fine.std_error},
                   {"analytic", analytic.value},
                   {"abs_diff", err},
                   {"tol", 3.0 * ref.fine.std_error}});
        const double step_shift = std::fabs(ref.fine.mean - ref.coarse.mean);
        add_check("mc_step_refinement", step_shift < ref.fine.std_error,
                  {{"fine_mean", ref.fine.mean},
                   {"coarse_mean", ref.coarse.mean},
                   {"abs_diff", step_shift},
                   {"tol", ref.fine.std_error}});
    }

    // PDE agreement
    json pde_detail;
    try {
        PdeGrid grid = default_pde_grid(cfg.contract, cfg.market, 400);
        const GridFlag gf = parse_grid_flag(grid_text);
        if (gf.set) {
            grid.x_min = gf.lo;
            grid.x_max = gf.hi;
            grid.n_space = gf.n;
            grid.n_time = gf.n;
        }
        const PdeSolution pde = solve_linear_pde(cfg.contract, cfg.market, cfg.policy, grid, tol);
        const double err = std::fabs(pde.value - analytic.value);
        add_check("pde_vs_analytic", err <= tol,
                  {{"pde_value", pde.value},
                   {"analytic", analytic.value},
                   {"abs_diff", err},
                   {"richardson_error", pde.richardson_error},
                   {"tol", tol}});
    } catch (const GridTooCoarse& e) {
        add_check("pde_vs_analytic", false, {{"error", std::string("GridTooCoarse: ") + e.what()}});
    }

    // closed-form cross-check when the strike sits at the ATM risk-free level
    if (std::fabs(cfg.contract.strike / atmrf_strike(cfg.contract, cfg.market) - 1.0) <= 1e-12) {
        const ValuationResult atm = price_atmrf(cfg.contract, cfg.market, cfg.policy);
        const double rel = std::fabs(atm.value - analytic.value) / cfg.market.s;
        add_check("atm_vs_quadrature", rel <= 1e-9,
                  {{"atm_value", atm.value}, {"diff_over_notional", rel}, {"tol", 1e-9}});
    }

    json out;
    out["analytic"] = result_json(analytic);
    out["mc"] = {{"mean", ref.fine.mean},
                 {"std_error", ref.fine.std_error},
                 {"n_paths", ref.fine.n_paths}};
    out["checks"] = checks;
    out["pass"] = all_pass;
    out["config"] = config_echo(cfg);
    emit(opts, out.dump(2) + "\n");
    return all_pass ? kExitOk : kExitVerification;
}

int cmd_correlation(const CommonOptions& opts, std::uint64_t paths, std::uint64_t seed) {
    const RunConfig cfg = load_config(opts);
    const double horizon = cfg.contract.tau();

    const double closed = stock_default_correlation(cfg.market, horizon);
    McConfig mc;
    mc.n_paths = paths;
    mc.seed = seed;
    const McEstimate est = mc_correlation(cfg.market, horizon, mc);
    const DefaultStats stats = p_measure_default_stats(cfg.market, horizon, mc);

    const double lambda = cfg.market.lambda1 + cfg.market.lambda2;
    const double p_theory = -std::expm1(-lambda * horizon);
    const double p_hat = double(stats.defaulted_by_horizon) / double(stats.n_paths);
    const double se_p = std::sqrt(p_theory * (1.0 - p_theory) / double(stats.n_paths));

    json out;
    out["horizon"] = horizon;
    out["closed_form"] = closed;
    out["mc"] = {{"mean", est.mean}, {"std_error", est.std_error}, {"n_paths", est.n_paths}};
    out["z_score"] = est.std_error > 0.0 ? (est.mean - closed) / est.std_error : 0.0;
    out["first_default"] = {{"empirical_p", p_hat},
                            {"theoretical_p", p_theory},
                            {"binomial_std_error", se_p},
                            {"simultaneous", stats.simultaneous}};
    out["config"] = config_echo(cfg);
    emit(opts, out.dump(2) + "\n");
    return kExitOk;
}

int cmd_bounds(const CommonOptions& opts, double tol) {
    const RunConfig cfg = load_config(opts);
    QuadConfig quad;
    quad.abs_tol = tol;
    const PriceBand band = no_arbitrage_band(cfg.contract, cfg.market, cfg.policy, quad);
    json out;
    out["lower"] = band.lower;
    out["upper"] = band.upper;
    out["width"] = band.width();
    out["dealer"] = result_json(band.dealer);
    out["client"] = result_json(band.client);
    out["no_arb_violations"] = violations_json(cfg.market);
    out["config"] = config_echo(cfg);
    emit(opts, out.dump(2) + "\n");
    return kExitOk;
}

int cmd_hedge(const CommonOptions& opts, double tol) {
    const RunConfig cfg = load_config(opts);
    QuadConfig quad;
    quad.abs_tol = tol;
    const HedgeSnapshot h = hedge_units(cfg.contract, cfg.market, cfg.policy, cfg.market.s,
                                        cfg.contract.valuation_time, quad);
    const double portfolio = h.stock_outright * cfg.market.s + h.bond1_outright * h.bond1_price +
                             h.bond2_outright * h.bond2_price + h.deposit_units * h.deposit_price +
                             h.funding_units * h.funding_price;
    json out;
    out["value"] = h.value;
    out["delta"] = h.delta;
    out["units"] = {{"stock_total", h.stock_units},
                    {"bond1_total", h.bond1_units},
                    {"bond2_total", h.bond2_units},
                    {"deposit", h.deposit_units},
                    {"funding", h.funding_units}};
    out["outright"] = {{"stock", h.stock_outright},
                       {"bond1", h.bond1_outright},
                       {"bond2", h.bond2_outright}};
    out["prices"] = {{"bond1", h.bond1_price},
                     {"bond2", h.bond2_price},
                     {"deposit", h.deposit_price},
                     {"funding", h.funding_price}};
    out["checks"] = {{"optimality_product", h.deposit_units * h.funding_units},
                     {"funding_residual", h.value + portfolio}};
    out["config"] = config_echo(cfg);
    emit(opts, out.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vulnerable forward pricing under funding, credit and wrong-way risk"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string method = "quadrature";
    std::string mode = "ctm";
    std::string param, param2, grid_text, grid2_text;
    std::string metric = "bps";
    double tol = 1e-10;
    double verify_tol = 1e-3;
    std::uint64_t paths = 1000000;
    std::uint64_t seed = 42;
    bool verify_flag = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON config file")->required();
        sub->add_option("--out", opts.out_path, "write output to this file instead of stdout");
    };

    CLI::App* price = app.add_subcommand("price", "price one contract");
    add_common(price);
    price->add_option("--method", method, "quadrature | atm | approx")
        ->check(CLI::IsMember({"quadrature", "atm", "approx"}));
    price->add_option("--tol", tol, "quadrature absolute tolerance");
    price->add_flag("--verify", verify_flag, "cross-check against an alternative formula");

    CLI::App* verify = app.add_subcommand("verify", "analytic vs Monte Carlo vs PDE");
    add_common(verify);
    verify->add_option("--paths", paths, "Monte Carlo paths");
    verify->add_option("--seed", seed, "Monte Carlo seed");
    verify->add_option("--tol", verify_tol, "PDE absolute tolerance");
    verify->add_option("--grid", grid_text, "PDE grid as x_min:x_max:n (default auto, 400)");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
    add_common(sweep);
    sweep->add_option("--param", param, "parameter to sweep")->required();
    sweep->add_option("--param2", param2, "second axis (joint grid)");
    sweep->add_option("--mode", mode, "ctm | cts")->check(CLI::IsMember({"ctm", "cts"}));
    sweep->add_option("--grid", grid_text, "grid as lo:hi:n (default: baseline range, 61 pts)");
    sweep->add_option("--grid2", grid2_text, "second-axis grid as lo:hi:n");
    sweep->add_option("--metric", metric, "bps | raw")->check(CLI::IsMember({"bps", "raw"}));
    sweep->add_option("--tol", tol, "quadrature absolute tolerance");

    CLI::App* corr = app.add_subcommand("correlation", "stock-default correlation: closed form vs MC");
    add_common(corr);
    corr->add_option("--paths", paths, "Monte Carlo paths");
    corr->add_option("--seed", seed, "Monte Carlo seed");

    CLI::App* bounds = app.add_subcommand("bounds", "no-arbitrage price band [v, -nu]");
    add_common(bounds);
    bounds->add_option("--tol", tol, "quadrature absolute tolerance");

    CLI::App* hedge = app.add_subcommand("hedge", "replicating-strategy snapshot");
    add_common(hedge);
    hedge->add_option("--tol", tol, "quadrature absolute tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (price->parsed()) return cmd_price(opts, method, tol, verify_flag);
        if (verify->parsed()) return cmd_verify(opts, paths, seed, verify_tol, grid_text);
        if (sweep->parsed())
            return cmd_sweep(opts, param, param2, mode, grid_text, grid2_text, metric, tol);
        if (corr->parsed()) return cmd_correlation(opts, paths, seed);
        if (bounds->parsed()) return cmd_bounds(opts, tol);
        if (hedge->parsed()) return cmd_hedge(opts, tol);
    } catch (const QuadratureNonConvergence& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const GridTooCoarse& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DegenerateVariance& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
