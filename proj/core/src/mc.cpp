#include "vulnfwd/mc.hpp"

#include "vulnfwd/errors.hpp"
#include "vulnfwd/parallel.hpp"
#include "vulnfwd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vulnfwd {

namespace {

constexpr std::int64_t kBlock = 16384;

struct MomentSums {
    double sum = 0.0;
    double sum_sq = 0.0;
};

McEstimate reduce_moments(const std::vector<MomentSums>& blocks, std::uint64_t n_units,
                          std::uint64_t n_paths) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& b : blocks) {
        sum += b.sum;
        sum_sq += b.sum_sq;
    }
    McEstimate est;
    est.n_paths = n_paths;
    est.mean = sum / double(n_units);
    const double var =
        std::max(0.0, (sum_sq - double(n_units) * est.mean * est.mean) / double(n_units - 1));
    est.std_error = std::sqrt(var / double(n_units));
    return est;
}

// Everything a path walk needs, precomputed once per pricing call.
struct QhatPlan {
    int n_steps;
    double dt;
    double drift_dt;   // (mu_hat - sigma^2/2) * dt
    double vol_sqdt;   // sigma * sqrt(dt)
    double one_kappa;
    double strike;
    double b_hat_v;
    double b;
    std::vector<double> disc;         // exp(-r_hat_v * j * dt)
    std::vector<double> strike_disc;  // K * exp(-r * (tau - j*dt))
    std::vector<double> trap_w;       // trapezoid weights * dt
};

QhatPlan make_plan(const ForwardContract& contract, const MarketParams& p,
                   const DerivedRates& d, int n_steps) {
    QhatPlan plan;
    const double tau = contract.tau();
    plan.n_steps = n_steps;
    plan.dt = tau / n_steps;
    plan.drift_dt = (d.mu_hat - 0.5 * p.sigma * p.sigma) * plan.dt;
    plan.vol_sqdt = p.sigma * std::sqrt(plan.dt);
    plan.one_kappa = 1.0 + p.kappa;
    plan.strike = contract.strike;
    plan.b_hat_v = d.b_hat_v;
    plan.b = d.b;
    plan.disc.resize(n_steps + 1);
    plan.strike_disc.resize(n_steps + 1);
    plan.trap_w.resize(n_steps + 1);
    for (int j = 0; j <= n_steps; ++j) {
        const double u = j * plan.dt;
        plan.disc[j] = std::exp(-d.r_hat_v * u);
        plan.strike_disc[j] = contract.strike * std::exp(-p.r * (tau - u));
        plan.trap_w[j] = (j == 0 || j == n_steps) ? 0.5 * plan.dt : plan.dt;
    }
    return plan;
}

// Walks one path; fills value on the configured grid and, if coarse is true,
// the every-other-node trapezoid value from the same increments.
struct PathValues {
    double fine;
    double coarse;
};

PathValues walk_qhat(const QhatPlan& plan, const MarketParams& p, const PathRng& rng,
                     double sign, bool want_coarse) {
    double log_s = std::log(p.s);
    double i1 = 0.0, i2 = 0.0;        // fine trapezoid accumulators
    double i1c = 0.0, i2c = 0.0;      // coarse (stride 2)
    {
        const double z0 = plan.one_kappa * p.s - plan.strike_disc[0];
        i1 = plan.trap_w[0] * z0;
        i2 = plan.trap_w[0] * std::max(z0, 0.0);
        i1c = 2.0 * plan.trap_w[0] * z0;
        i2c = 2.0 * plan.trap_w[0] * std::max(z0, 0.0);
    }
    double s_t = p.s;
    for (int j = 1; j <= plan.n_steps; ++j) {
        log_s += plan.drift_dt + plan.vol_sqdt * sign * rng.normal(j - 1);
        s_t = std::exp(log_s);
        const double z = plan.disc[j] * (plan.one_kappa * s_t - plan.strike_disc[j]);
        i1 += plan.trap_w[j] * z;
        i2 += plan.trap_w[j] * std::max(z, 0.0);
        if (want_coarse && (j % 2 == 0)) {
            const double w = (j == plan.n_steps) ? plan.dt : 2.0 * plan.dt;
            i1c += w * z;
            i2c += w * std::max(z, 0.0);
        }
    }
    const double terminal = plan.disc[plan.n_steps] * (s_t - plan.strike);
    PathValues out;
    out.fine = terminal + plan.b_hat_v * i1 - plan.b * i2;
    out.coarse = terminal + plan.b_hat_v * i1c - plan.b * i2c;
    return out;
}

struct QhatEstimates {
    McEstimate fine;
    McEstimate coarse;
};

QhatEstimates run_qhat(const ForwardContract& contract, const MarketParams& params,
                       const FundingPolicy& policy, const McConfig& cfg, bool want_coarse) {
    contract.validate();
    params.validate();
    policy.validate();
    require_linearizing(params, policy);
    cfg.validate();
    if (want_coarse && cfg.n_steps % 2 != 0)
        throw std::invalid_argument("step-refinement check needs an even n_steps");

    const DerivedRates d = derive_rates(params, policy);
    const QhatPlan plan = make_plan(contract, params, d, cfg.n_steps);

    const std::uint64_t n_units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
    const std::int64_t n_blocks = std::int64_t((n_units + kBlock - 1) / kBlock);
    std::vector<MomentSums> fine(n_blocks), coarse(n_blocks);

    parallel_blocks(std::int64_t(n_units), kBlock,
                    [&](std::int64_t blk, std::int64_t begin, std::int64_t end) {
                        MomentSums fs, cs;
                        for (std::int64_t u = begin; u < end; ++u) {
                            const PathRng rng(cfg.seed, std::uint64_t(u));
                            PathValues v = walk_qhat(plan, params, rng, 1.0, want_coarse);
                            if (cfg.antithetic) {
                                const PathValues w =
                                    walk_qhat(plan, params, rng, -1.0, want_coarse);
                                v.fine = 0.5 * (v.fine + w.fine);
                                v.coarse = 0.5 * (v.coarse + w.coarse);
                            }
                            fs.sum += v.fine;
                            fs.sum_sq += v.fine * v.fine;
                            cs.sum += v.coarse;
                            cs.sum_sq += v.coarse * v.coarse;
                        }
                        fine[blk] = fs;
                        coarse[blk] = cs;
                    });

    QhatEstimates out;
    out.fine = reduce_moments(fine, n_units, cfg.n_paths);
    if (want_coarse) out.coarse = reduce_moments(coarse, n_units, cfg.n_paths);
    return out;
}

}  // namespace

void McConfig::validate() const {
    if (n_paths < 2) throw std::invalid_argument("n_paths must be >= 2");
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (antithetic && n_paths % 2 != 0)
        throw std::invalid_argument("antithetic sampling needs an even n_paths");
}

McEstimate mc_price_qhat(const ForwardContract& contract, const MarketParams& params,
                         const FundingPolicy& policy, const McConfig& cfg) {
    return run_qhat(contract, params, policy, cfg, false).fine;
}

McStepRefinement mc_price_qhat_step_check(const ForwardContract& contract,
                                          const MarketParams& params,
                                          const FundingPolicy& policy, const McConfig& cfg) {
    const QhatEstimates est = run_qhat(contract, params, policy, cfg, true);
    return {est.fine, est.coarse};
}

namespace {

PathSample draw_p_measure(const MarketParams& p, double horizon, const PathRng& rng) {
    const double inf = std::numeric_limits<double>::infinity();
    const double tau1 = p.lambda1 > 0.0 ? -std::log(rng.uniform(0)) / p.lambda1 : inf;
    const double tau2 = p.lambda2 > 0.0 ? -std::log(rng.uniform(1)) / p.lambda2 : inf;
    PathSample out;
    out.default_time = std::min(tau1, tau2);
    out.first_defaulter = (out.default_time == inf) ? 0 : (tau1 <= tau2 ? 1 : 2);
    out.default_indicator = (out.default_time <= horizon) ? 1.0 : 0.0;
    const double z = rng.normal(2);
    const double diffusion =
        p.s * std::exp((p.mu - p.q - 0.5 * p.sigma * p.sigma) * horizon +
                       p.sigma * std::sqrt(horizon) * z);
    out.stock = diffusion * (1.0 + p.kappa * out.default_indicator);
    return out;
}

}  // namespace

std::vector<PathSample> simulate_p_measure(const MarketParams& params, double horizon,
                                           const McConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");

    std::vector<PathSample> out(cfg.n_paths);
    parallel_blocks(std::int64_t(cfg.n_paths), kBlock,
                    [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                        for (std::int64_t i = begin; i < end; ++i)
                            out[std::size_t(i)] =
                                draw_p_measure(params, horizon, PathRng(cfg.seed, std::uint64_t(i)));
                    });
    return out;
}

DefaultStats p_measure_default_stats(const MarketParams& params, double horizon,
                                     const McConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");

    const double inf = std::numeric_limits<double>::infinity();
    const std::int64_t n_blocks = std::int64_t((cfg.n_paths + kBlock - 1) / kBlock);
    std::vector<DefaultStats> blocks(n_blocks);
    parallel_blocks(std::int64_t(cfg.n_paths), kBlock,
                    [&](std::int64_t blk, std::int64_t begin, std::int64_t end) {
                        DefaultStats st;
                        for (std::int64_t i = begin; i < end; ++i) {
                            const PathRng rng(cfg.seed, std::uint64_t(i));
                            const double tau1 =
                                params.lambda1 > 0.0 ? -std::log(rng.uniform(0)) / params.lambda1
                                                     : inf;
                            const double tau2 =
                                params.lambda2 > 0.0 ? -std::log(rng.uniform(1)) / params.lambda2
                                                     : inf;
                            if (tau1 == tau2 && tau1 != inf) ++st.simultaneous;
                            const double tau = std::min(tau1, tau2);
                            if (tau <= horizon) {
                                ++st.defaulted_by_horizon;
                                if (tau1 <= tau2)
                                    ++st.first_is_1;
                                else
                                    ++st.first_is_2;
                            }
                        }
                        blocks[blk] = st;
                    });
    DefaultStats total;
    total.n_paths = cfg.n_paths;
    for (const auto& b : blocks) {
        total.defaulted_by_horizon += b.defaulted_by_horizon;
        total.first_is_1 += b.first_is_1;
        total.first_is_2 += b.first_is_2;
        total.simultaneous += b.simultaneous;
    }
    return total;
}

McEstimate mc_correlation(const MarketParams& params, double t, const McConfig& cfg) {
    params.validate();
    cfg.validate();
    if (!(t > 0.0)) throw std::invalid_argument("correlation horizon must be > 0");
    if (params.lambda1 + params.lambda2 <= 0.0)
        throw std::invalid_argument("correlation needs at least one positive intensity");

    const std::uint64_t n = cfg.n_paths;
    const std::int64_t n_blocks = std::int64_t((n + kBlock - 1) / kBlock);

    // Pass 1: means of (S_t, J_t). Paths are regenerated per pass from the
    // counter-based generator instead of being stored.
    struct Sums {
        double x = 0.0, y = 0.0;
    };
    std::vector<Sums> sums(n_blocks);
    parallel_blocks(std::int64_t(n), kBlock, [&](std::int64_t blk, std::int64_t b, std::int64_t e) {
        Sums s;
        for (std::int64_t i = b; i < e; ++i) {
            const PathSample ps = draw_p_measure(params, t, PathRng(cfg.seed, std::uint64_t(i)));
            s.x += ps.stock;
            s.y += ps.default_indicator;
        }
        sums[blk] = s;
    });
    double mx = 0.0, my = 0.0;
    for (const auto& s : sums) {
        mx += s.x;
        my += s.y;
    }
    mx /= double(n);
    my /= double(n);

    // Pass 2: centered second moments.
    struct Centered {
        double xx = 0.0, yy = 0.0, xy = 0.0;
    };
    std::vector<Centered> cen(n_blocks);
    parallel_blocks(std::int64_t(n), kBlock, [&](std::int64_t blk, std::int64_t b, std::int64_t e) {
        Centered c;
        for (std::int64_t i = b; i < e; ++i) {
            const PathSample ps = draw_p_measure(params, t, PathRng(cfg.seed, std::uint64_t(i)));
            const double dx = ps.stock - mx;
            const double dy = ps.default_indicator - my;
            c.xx += dx * dx;
            c.yy += dy * dy;
            c.xy += dx * dy;
        }
        cen[blk] = c;
    });
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& c : cen) {
        sxx += c.xx;
        syy += c.yy;
        sxy += c.xy;
    }
    if (syy == 0.0 || sxx == 0.0)
        throw DegenerateVariance("all paths share the same default state at t");
    const double corr = sxy / std::sqrt(sxx * syy);

    // Pass 3: delete-one jackknife. Leave-one-out moments follow exactly from
    // the totals; deviations are accumulated against the full-sample value to
    // avoid cancellation.
    struct Jack {
        double dev = 0.0, dev_sq = 0.0;
    };
    const double adj = double(n) / double(n - 1);
    std::vector<Jack> jack(n_blocks);
    parallel_blocks(std::int64_t(n), kBlock, [&](std::int64_t blk, std::int64_t b, std::int64_t e) {
        Jack j;
        for (std::int64_t i = b; i < e; ++i) {
            const PathSample ps = draw_p_measure(params, t, PathRng(cfg.seed, std::uint64_t(i)));
            const double dx = ps.stock - mx;
            const double dy = ps.default_indicator - my;
            const double xx = sxx - adj * dx * dx;
            const double yy = syy - adj * dy * dy;
            const double xy = sxy - adj * dx * dy;
            const double ci = (xx > 0.0 && yy > 0.0) ? xy / std::sqrt(xx * yy) : corr;
            const double dev = ci - corr;
            j.dev += dev;
            j.dev_sq += dev * dev;
        }
        jack[blk] = j;
    });
    double dev = 0.0, dev_sq = 0.0;
    for (const auto& j : jack) {
        dev += j.dev;
        dev_sq += j.dev_sq;
    }
    const double mean_dev = dev / double(n);
    const double jk_var =
        double(n - 1) / double(n) * std::max(0.0, dev_sq - double(n) * mean_dev * mean_dev);

    McEstimate est;
    est.mean = corr;
    est.std_error = std::sqrt(jk_var);
    est.n_paths = n;
    return est;
}

}  // namespace vulnfwd
