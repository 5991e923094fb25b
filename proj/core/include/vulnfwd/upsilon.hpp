#pragma once

namespace vulnfwd {

/// Upsilon0(t, x, y) = integral over [0, t] of exp(-x*u) * Phi(y*sqrt(u)) du.
///
/// Closed form (valid for c = 2x + y^2 > 0, x != 0):
///   (y / (x*sqrt(c))) * (Phi(sqrt(c*t)) - 1/2) - (1/x) * (exp(-x*t)*Phi(y*sqrt(t)) - 1/2)
/// The x = 0 and y = 0 cases use exact limit expressions; c <= 0 (reachable
/// only for strongly negative x, outside arbitrage-free parameter sets) and
/// near-zero x fall back to adaptive quadrature of the defining integral.
double upsilon0(double t, double x, double y);

/// Second-order-in-z approximation to
///   Upsilon(t, x, y, z) = integral over [0, t] of exp(-x*u) * Phi(y*sqrt(u) + z/sqrt(u)) du,
/// namely
///   Upsilon0(t, x, y) + (2/sqrt(c)) * (Phi(sqrt(c*t)) - 1/2) * (z - (y/2)*z^2) - z*|z|/2
/// with error O(|z|^3). The z*|z|/2 term is the boundary-layer contribution of
/// the integrand near u = 0; without it the error is only O(z^2). Falls back
/// to quadrature of the defining integral when c <= 0.
double upsilon_tilde(double t, double x, double y, double z);

}  // namespace vulnfwd
