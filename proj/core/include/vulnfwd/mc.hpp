#pragma once

#include "vulnfwd/contract.hpp"
#include "vulnfwd/market.hpp"

#include <cstdint>
#include <vector>

namespace vulnfwd {

struct McConfig {
    std::uint64_t n_paths = 100000;
    int n_steps = 250;  ///< time steps over the simulation horizon
    std::uint64_t seed = 42;
    bool antithetic = false;

    /// Throws std::invalid_argument unless n_paths >= 2 and n_steps >= 1
    /// (and n_paths even when antithetic).
    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
};

/// Monte Carlo evaluation of the pre-default value: simulates the pricing-
/// measure GBM with exact lognormal stepping (no discretization error in the
/// marginals) and discretizes the two recovery time-integrals with the
/// trapezoid rule on the path grid. Identical seed and config give
/// bit-identical estimates regardless of thread count.
McEstimate mc_price_qhat(const ForwardContract& contract, const MarketParams& params,
                         const FundingPolicy& policy, const McConfig& cfg);

/// Paired estimates from one set of paths: the configured trapezoid grid and
/// the grid with every second node dropped. Because GBM stepping is exact,
/// the coarse estimate is distributed exactly as an n_steps/2 run; the pair
/// isolates the time-integral discretization effect from Monte Carlo noise.
struct McStepRefinement {
    McEstimate fine;
    McEstimate coarse;
};

/// Requires even cfg.n_steps.
McStepRefinement mc_price_qhat_step_check(const ForwardContract& contract,
                                          const MarketParams& params,
                                          const FundingPolicy& policy, const McConfig& cfg);

/// One physical-measure path sampled at the horizon: terminal stock level,
/// default indicator, first default time (may exceed the horizon; +inf when
/// no intensity), and who defaulted first (0 = nobody ever, 1 or 2).
struct PathSample {
    double stock = 0.0;
    double default_indicator = 0.0;
    double default_time = 0.0;
    int first_defaulter = 0;
};

/// Exact simulation under the physical measure: exponential default times by
/// inversion, jump factor applied in closed form (no Euler bias).
std::vector<PathSample> simulate_p_measure(const MarketParams& params, double horizon,
                                           const McConfig& cfg);

/// Streaming counts over n_paths draws of the default times only.
struct DefaultStats {
    std::uint64_t n_paths = 0;
    std::uint64_t defaulted_by_horizon = 0;
    std::uint64_t first_is_1 = 0;  ///< among defaults by the horizon
    std::uint64_t first_is_2 = 0;
    std::uint64_t simultaneous = 0;  ///< tau1 == tau2 occurrences (expected 0)
};

DefaultStats p_measure_default_stats(const MarketParams& params, double horizon,
                                     const McConfig& cfg);

/// Sample Pearson correlation of (S_t, J_t) with a delete-one jackknife
/// standard error. Throws DegenerateVariance when every path shares the same
/// default state at t.
McEstimate mc_correlation(const MarketParams& params, double t, const McConfig& cfg);

}  // namespace vulnfwd
