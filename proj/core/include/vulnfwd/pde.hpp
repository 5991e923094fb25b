#pragma once

#include "vulnfwd/contract.hpp"
#include "vulnfwd/market.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace vulnfwd {

enum class PdeScheme { crank_nicolson, implicit };

/// Uniform log-price grid for the backward solve.
struct PdeGrid {
    double x_min = 0.0;  ///< lower log-price bound
    double x_max = 0.0;  ///< upper log-price bound
    int n_space = 400;   ///< grid nodes (>= 3)
    int n_time = 400;    ///< time steps
    PdeScheme scheme = PdeScheme::crank_nicolson;
};

/// Domain spanning +/- 6 sigma sqrt(T-t) in log-price around the ATM
/// risk-free strike, n nodes and n time steps.
PdeGrid default_pde_grid(const ForwardContract& contract, const MarketParams& params, int n = 400);

struct PdeSolution {
    double value = 0.0;             ///< v(t, s), cubic-interpolated at x = ln s
    double richardson_error = 0.0;  ///< half-resolution Richardson error estimate
    std::vector<double> x;          ///< grid nodes
    std::vector<double> values;     ///< v at the valuation time on the grid
    // Optional full surface, row-major over (time level, node); time levels
    // run from expiry down to the valuation time.
    std::vector<double> t_levels;
    std::vector<double> surface;
};

/// Finite-difference solve of the linear pre-default problem (Crank-Nicolson
/// with a two-half-step implicit start, or fully implicit). The max{z, 0}
/// funding source is cell-averaged in closed form so its moving kink does not
/// degrade the second-order convergence. Dirichlet boundaries come from the
/// deep in/out-of-the-money asymptotics of the valuation formula.
///
/// When tolerance is set, throws GridTooCoarse if the Richardson estimate
/// (half-resolution comparison) exceeds it.
PdeSolution solve_linear_pde(const ForwardContract& contract, const MarketParams& params,
                             const FundingPolicy& policy, const PdeGrid& grid,
                             std::optional<double> tolerance = std::nullopt,
                             bool keep_surface = false);

/// CSV dump of the surface (columns t, s, v); requires keep_surface.
void write_surface_csv(std::ostream& os, const PdeSolution& solution);

}  // namespace vulnfwd
