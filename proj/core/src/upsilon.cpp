#include "vulnfwd/upsilon.hpp"

#include "vulnfwd/normal.hpp"
#include "vulnfwd/quadrature.hpp"

#include <cmath>

namespace vulnfwd {

namespace {

// |x| below this makes the 1/x closed form lose too many digits; the defining
// integral is cheap and only near-degenerate rate sets land here.
constexpr double kSmallX = 1e-5;

QuadConfig fallback_cfg() {
    QuadConfig cfg;
    cfg.abs_tol = 1e-12;
    cfg.max_levels = 24;
    return cfg;
}

// Quadrature of the defining integral with the u = w^2 substitution, which
// removes the sqrt(u) endpoint behavior.
double upsilon0_quadrature(double t, double x, double y) {
    auto f = [x, y](double w) { return 2.0 * w * std::exp(-x * w * w) * norm_cdf(y * w); };
    return integrate_gk(f, 0.0, std::sqrt(t), fallback_cfg()).value;
}

double upsilon_quadrature(double t, double x, double y, double z) {
    auto f = [x, y, z](double w) {
        if (w <= 0.0) return 0.0;
        return 2.0 * w * std::exp(-x * w * w) * norm_cdf(y * w + z / w);
    };
    return integrate_gk(f, 0.0, std::sqrt(t), fallback_cfg()).value;
}

// Exact x = 0 limit, by parts: t*Phi(y*sqrt(t)) + sqrt(t)/y * phi(y*sqrt(t))
//   - (Phi(y*sqrt(t)) - 1/2)/y^2.
double upsilon0_x_zero(double t, double y) {
    const double ys = y * std::sqrt(t);
    return t * norm_cdf(ys) + std::sqrt(t) / y * norm_pdf(ys) - (norm_cdf(ys) - 0.5) / (y * y);
}

}  // namespace

double upsilon0(double t, double x, double y) {
    if (t <= 0.0) return 0.0;
    if (y == 0.0) {
        // Constant integrand Phi(0) = 1/2; exact for every x.
        if (x == 0.0) return 0.5 * t;
        return -std::expm1(-x * t) / (2.0 * x);
    }
    const double c = 2.0 * x + y * y;
    if (c <= 0.0) return upsilon0_quadrature(t, x, y);
    if (std::fabs(x) <= kSmallX) {
        if (x == 0.0 && std::fabs(y) > 1e-3) return upsilon0_x_zero(t, y);
        return upsilon0_quadrature(t, x, y);
    }
    const double sc = std::sqrt(c);
    return (y / (x * sc)) * (norm_cdf(sc * std::sqrt(t)) - 0.5) -
           (std::exp(-x * t) * norm_cdf(y * std::sqrt(t)) - 0.5) / x;
}

double upsilon_tilde(double t, double x, double y, double z) {
    if (t <= 0.0) return 0.0;
    if (z == 0.0) return upsilon0(t, x, y);
    const double c = 2.0 * x + y * y;
    if (c <= 0.0) return upsilon_quadrature(t, x, y, z);
    const double sc = std::sqrt(c);
    const double gauss_weight = (2.0 / sc) * (norm_cdf(sc * std::sqrt(t)) - 0.5);
    return upsilon0(t, x, y) + gauss_weight * (z - 0.5 * y * z * z) - 0.5 * z * std::fabs(z);
}

}  // namespace vulnfwd
