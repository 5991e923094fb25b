#pragma once

#include <functional>

namespace vulnfwd {

struct QuadConfig {
    double abs_tol = 1e-10;
    int max_levels = 20;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;  // accumulated error estimate
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b] to an
/// absolute tolerance. Bisects intervals whose K15-G7 discrepancy exceeds
/// the length-proportional share of the budget, down to cfg.max_levels.
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        const QuadConfig& cfg = {});

/// Same, but throws QuadratureNonConvergence instead of reporting failure.
double integrate_gk_or_throw(const std::function<double(double)>& f, double a, double b,
                             const QuadConfig& cfg = {});

}  // namespace vulnfwd
