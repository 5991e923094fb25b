#include "vulnfwd/pde.hpp"

#include "vulnfwd/analytic.hpp"
#include "vulnfwd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace vulnfwd {

namespace {

double annuity(double rate, double tau) {
    // (1 - exp(-rate*tau)) / rate with the rate -> 0 limit
    if (std::fabs(rate) < 1e-12) return tau * (1.0 - 0.5 * rate * tau);
    return -std::expm1(-rate * tau) / rate;
}

struct Problem {
    double s, strike, kappa, r, sigma;
    double mu_hat, r_hat_v, b_hat_v, b;
    double horizon;
};

// Deep-ITM/OTM asymptotics of the valuation formula; tau is the remaining
// life. Used as Dirichlet data, where the neglected option tails are
// O(exp(-(domain half-width)^2 / (2 sigma^2 tau))).
double boundary_upper(const Problem& pr, double s_edge, double tau) {
    const double terminal = std::exp(-pr.r_hat_v * tau) *
                            (s_edge * std::exp(pr.mu_hat * tau) - pr.strike);
    const double call_int = (1.0 + pr.kappa) * s_edge * annuity(pr.r_hat_v - pr.mu_hat, tau) -
                            pr.strike * std::exp(-pr.r * tau) * annuity(pr.b_hat_v, tau);
    return terminal + (pr.b_hat_v - pr.b) * call_int;
}

double boundary_lower(const Problem& pr, double s_edge, double tau) {
    const double terminal = std::exp(-pr.r_hat_v * tau) *
                            (s_edge * std::exp(pr.mu_hat * tau) - pr.strike);
    const double put_int = pr.strike * std::exp(-pr.r * tau) * annuity(pr.b_hat_v, tau) -
                           (1.0 + pr.kappa) * s_edge * annuity(pr.r_hat_v - pr.mu_hat, tau);
    return terminal - pr.b_hat_v * put_int;
}

// Cell average over [xa, xb] of the source b_hat_v*z - b*max{z,0} with
// z(x) = (1+kappa)*e^x - disc_strike. Exact, so the kink at
// x = ln(disc_strike/(1+kappa)) never touches the scheme's order.
double source_cell_average(const Problem& pr, double xa, double xb, double disc_strike) {
    const double ok = 1.0 + pr.kappa;
    const double width = xb - xa;
    const double int_z = ok * (std::exp(xb) - std::exp(xa)) - disc_strike * width;
    const double x_kink = std::log(disc_strike / ok);
    double int_pos;
    if (xb <= x_kink) {
        int_pos = 0.0;
    } else if (xa >= x_kink) {
        int_pos = int_z;
    } else {
        int_pos = ok * (std::exp(xb) - std::exp(x_kink)) - disc_strike * (xb - x_kink);
    }
    return (pr.b_hat_v * int_z - pr.b * int_pos) / width;
}

// Thomas solve of (I - w*L) u = rhs on the interior nodes, L the discrete
// convection-diffusion-reaction operator. lower/diag/upper describe w*L.
void solve_tridiagonal(std::vector<double>& diag, std::vector<double>& upper,
                       std::vector<double>& rhs, const std::vector<double>& lower) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

double cubic_interpolate(const std::vector<double>& x, const std::vector<double>& v,
                         double x_eval) {
    const int n = int(x.size());
    const double h = x[1] - x[0];
    int i = int(std::floor((x_eval - x[0]) / h));
    i = std::clamp(i, 1, n - 3);  // 4-point stencil i-1 .. i+2
    const int j = i - 1;
    double result = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int c = 0; c < 4; ++c) {
            if (c == a) continue;
            w *= (x_eval - x[j + c]) / (x[j + a] - x[j + c]);
        }
        result += w * v[j + a];
    }
    return result;
}

PdeSolution solve_once(const ForwardContract& contract, const MarketParams& params,
                       const FundingPolicy& policy, const PdeGrid& grid, bool keep_surface) {
    const DerivedRates d = derive_rates(params, policy);
    Problem pr;
    pr.s = params.s;
    pr.strike = contract.strike;
    pr.kappa = params.kappa;
    pr.r = params.r;
    pr.sigma = params.sigma;
    pr.mu_hat = d.mu_hat;
    pr.r_hat_v = d.r_hat_v;
    pr.b_hat_v = d.b_hat_v;
    pr.b = d.b;
    pr.horizon = contract.tau();

    const int n = grid.n_space;
    const double h = (grid.x_max - grid.x_min) / (n - 1);
    PdeSolution sol;
    sol.x.resize(n);
    for (int i = 0; i < n; ++i) sol.x[i] = grid.x_min + i * h;

    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::exp(sol.x[i]) - pr.strike;

    if (keep_surface) {
        sol.t_levels.push_back(contract.expiry);
        sol.surface.insert(sol.surface.end(), v.begin(), v.end());
    }

    // Interior operator coefficients: (sigma^2/2) v_xx + (mu_hat - sigma^2/2) v_x
    // - r_hat_v v, constant on the log grid.
    const double diff = 0.5 * pr.sigma * pr.sigma;
    const double conv = pr.mu_hat - diff;
    const double lo_c = diff / (h * h) - conv / (2.0 * h);
    const double hi_c = diff / (h * h) + conv / (2.0 * h);
    const double mid_c = -2.0 * diff / (h * h) - pr.r_hat_v;

    const int interior = n - 2;
    std::vector<double> diag(interior), upper(interior), rhs(interior), lower(interior);
    std::vector<double> v_new(n);

    // One theta-weighted step from tau to tau + dt.
    auto step = [&](double tau, double dt, double theta) {
        const double tau_next = tau + dt;
        const double tau_src = (theta == 1.0) ? tau_next : tau + 0.5 * dt;
        const double disc_strike = pr.strike * std::exp(-pr.r * tau_src);

        for (int i = 1; i <= interior; ++i) {
            const double explicit_l =
                (theta == 1.0) ? 0.0
                               : (1.0 - theta) * dt *
                                     (lo_c * v[i - 1] + mid_c * v[i] + hi_c * v[i + 1]);
            const double g = source_cell_average(pr, sol.x[i] - 0.5 * h, sol.x[i] + 0.5 * h,
                                                 disc_strike);
            rhs[i - 1] = v[i] + explicit_l + dt * g;
            diag[i - 1] = 1.0 - theta * dt * mid_c;
            lower[i - 1] = -theta * dt * lo_c;
            upper[i - 1] = -theta * dt * hi_c;
        }
        v_new[0] = boundary_lower(pr, std::exp(sol.x[0]), tau_next);
        v_new[n - 1] = boundary_upper(pr, std::exp(sol.x[n - 1]), tau_next);
        rhs[0] += theta * dt * lo_c * v_new[0];
        rhs[interior - 1] += theta * dt * hi_c * v_new[n - 1];

        solve_tridiagonal(diag, upper, rhs, lower);
        for (int i = 1; i <= interior; ++i) v_new[i] = rhs[i - 1];
        v.swap(v_new);
    };

    const double dt = pr.horizon / grid.n_time;
    const bool rannacher = (grid.scheme == PdeScheme::crank_nicolson);
    for (int m = 0; m < grid.n_time; ++m) {
        const double tau = m * dt;
        if (grid.scheme == PdeScheme::implicit) {
            step(tau, dt, 1.0);
        } else if (rannacher && m == 0) {
            // implicit half-steps damp the terminal-data ringing
            step(tau, 0.5 * dt, 1.0);
            step(tau + 0.5 * dt, 0.5 * dt, 1.0);
        } else {
            step(tau, dt, 0.5);
        }
        if (keep_surface) {
            sol.t_levels.push_back(contract.expiry - (m + 1) * dt);
            sol.surface.insert(sol.surface.end(), v.begin(), v.end());
        }
    }

    sol.values = v;
    sol.value = cubic_interpolate(sol.x, sol.values, std::log(pr.s));
    return sol;
}

}  // namespace

PdeGrid default_pde_grid(const ForwardContract& contract, const MarketParams& params, int n) {
    const double center = std::log(atmrf_strike(contract, params));
    const double half_width = 6.0 * params.sigma * std::sqrt(contract.tau());
    PdeGrid g;
    g.x_min = center - half_width;
    g.x_max = center + half_width;
    g.n_space = n;
    g.n_time = n;
    return g;
}

PdeSolution solve_linear_pde(const ForwardContract& contract, const MarketParams& params,
                             const FundingPolicy& policy, const PdeGrid& grid,
                             std::optional<double> tolerance, bool keep_surface) {
    contract.validate();
    params.validate();
    policy.validate();
    require_linearizing(params, policy);
    if (grid.n_space < 3) throw std::invalid_argument("n_space must be >= 3");
    if (grid.n_time < 1) throw std::invalid_argument("n_time must be >= 1");
    if (!(grid.x_min < std::log(params.s) && std::log(params.s) < grid.x_max))
        throw std::invalid_argument("grid must bracket ln(s)");

    PdeSolution sol = solve_once(contract, params, policy, grid, keep_surface);

    if (grid.n_space >= 9 && grid.n_time >= 4) {
        PdeGrid half = grid;
        half.n_space = grid.n_space / 2 + 1;
        half.n_time = grid.n_time / 2;
        const PdeSolution coarse = solve_once(contract, params, policy, half, false);
        // second-order scheme: halving the resolution scales the error by ~4
        sol.richardson_error = std::fabs(sol.value - coarse.value) / 3.0;
    }
    if (tolerance && sol.richardson_error > *tolerance) {
        throw GridTooCoarse("PDE grid too coarse: Richardson error estimate " +
                            std::to_string(sol.richardson_error) + " exceeds tolerance " +
                            std::to_string(*tolerance));
    }
    return sol;
}

void write_surface_csv(std::ostream& os, const PdeSolution& sol) {
    if (sol.surface.empty()) throw std::invalid_argument("solution has no stored surface");
    const std::size_t n = sol.x.size();
    os << "t,s,v\n";
    char buf[128];
    for (std::size_t level = 0; level < sol.t_levels.size(); ++level) {
        for (std::size_t i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", sol.t_levels[level],
                          std::exp(sol.x[i]), sol.surface[level * n + i]);
            os << buf;
        }
    }
}

}  // namespace vulnfwd
