#pragma once

// Shared fixtures and test-side oracles. The quadrature oracle here is an
// adaptive Simpson rule, deliberately independent of the Gauss-Kronrod
// integrator inside the library.

#include "vulnfwd/market.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace testutil {

inline vulnfwd::MarketParams baseline_params() {
    vulnfwd::MarketParams p;
    p.s = 1.0;
    p.r = 0.04;
    p.f = 0.06;
    p.q = 0.055;
    p.sigma = 0.30;
    p.h_s = 0.05;
    p.h1 = 0.055;
    p.h2 = 0.055;
    p.r1 = 0.07;
    p.r2 = 0.07;
    p.lambda1 = 0.01;
    p.lambda2 = 0.01;
    p.kappa = 0.0;
    p.mu = 0.04;
    return p;
}

constexpr double kBaselineExpiry = 5.0;

inline vulnfwd::FundingPolicy baseline_policy(double kappa = 0.0) {
    return vulnfwd::FundingPolicy::linearizing(0.5, kappa);
}

struct ParamDraw {
    vulnfwd::MarketParams params;
    vulnfwd::FundingPolicy policy;
    double expiry;
};

/// Samples a parameter set satisfying every no-arbitrage inequality, with a
/// linearizing policy attached.
inline ParamDraw random_arbitrage_free(std::mt19937_64& gen) {
    auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    };
    ParamDraw d;
    vulnfwd::MarketParams& p = d.params;
    p.r = uni(-0.02, 0.08);
    p.f = p.r + uni(0.001, 0.06);
    p.h_s = uni(p.r, p.f);
    p.h1 = uni(p.r, p.f);
    p.h2 = uni(p.r, p.f);
    p.r1 = p.h1 + uni(0.002, 0.08);
    p.r2 = p.h2 + uni(0.002, 0.08);
    p.q = uni(0.0, 0.10);
    p.sigma = uni(0.10, 0.60);
    p.kappa = uni(-0.5, 0.0);
    p.s = uni(0.5, 2.0);
    p.lambda1 = uni(0.0, 0.05);
    p.lambda2 = uni(0.0, 0.05);
    p.mu = p.r;
    d.policy = vulnfwd::FundingPolicy::linearizing(uni(0.0, 1.0), p.kappa);
    d.expiry = uni(0.5, 10.0);
    return d;
}

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson integration (test-only oracle).
inline double simpson_quad(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson(f, a, b, fa, fm, fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace testutil
