#pragma once

#include <string>

namespace vulnfwd {

/// Single-period forward on the stock: payoff S_T - K at expiry if neither
/// party has defaulted, risk-free close-out otherwise.
struct ForwardContract {
    double strike = 1.0;
    double expiry = 1.0;          ///< T, years
    double valuation_time = 0.0;  ///< t, years, 0 <= t < T

    double tau() const { return expiry - valuation_time; }

    /// Throws std::invalid_argument unless K > 0 and 0 <= t < T.
    void validate() const;
};

enum class Method { quadrature, atm_closed_form, approx, mc, pde };

std::string method_name(Method m);

/// Value plus its decomposition into the terminal cash-flow component and the
/// two default-recovery components (value = sum of the three).
struct ValuationResult {
    double value = 0.0;
    double terminal_component = 0.0;
    double put_recovery_component = 0.0;
    double call_recovery_component = 0.0;
    Method method = Method::quadrature;
    double bps_per_year = 0.0;   ///< value / (s * (T - t)) * 1e4
    double quad_abs_error = 0.0; ///< achieved quadrature error estimate (0 for closed forms)
    bool out_of_domain = false;  ///< approx called outside its validated moneyness range
};

}  // namespace vulnfwd
