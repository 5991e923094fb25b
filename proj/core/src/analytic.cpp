#include "vulnfwd/analytic.hpp"

#include "vulnfwd/errors.hpp"
#include "vulnfwd/normal.hpp"
#include "vulnfwd/upsilon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vulnfwd {

void ForwardContract::validate() const {
    if (!(strike > 0.0)) throw std::invalid_argument("strike must be > 0");
    if (!(expiry > 0.0) || !std::isfinite(expiry))
        throw std::invalid_argument("expiry must be a positive finite time");
    if (!(valuation_time >= 0.0) || !(valuation_time < expiry))
        throw std::invalid_argument("valuation time must satisfy 0 <= t < T");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::quadrature: return "quadrature";
        case Method::atm_closed_form: return "atm_closed_form";
        case Method::approx: return "approx";
        case Method::mc: return "mc";
        case Method::pde: return "pde";
    }
    return "unknown";
}

double bs_call_qhat(double s, double k, double tau, const DerivedRates& rates, double sigma) {
    if (tau <= 0.0) return std::max(s - k, 0.0);
    const double fwd = s * std::exp(rates.mu_hat * tau);
    if (k <= 0.0) return fwd;
    const double st = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / k) + (rates.mu_hat + 0.5 * sigma * sigma) * tau) / st;
    const double d2 = d1 - st;
    return fwd * norm_cdf(d1) - k * norm_cdf(d2);
}

double bs_put_qhat(double s, double k, double tau, const DerivedRates& rates, double sigma) {
    if (tau <= 0.0) return std::max(k - s, 0.0);
    if (k <= 0.0) return 0.0;
    const double st = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / k) + (rates.mu_hat + 0.5 * sigma * sigma) * tau) / st;
    const double d2 = d1 - st;
    return k * norm_cdf(-d2) - s * std::exp(rates.mu_hat * tau) * norm_cdf(-d1);
}

double mtm_risk_free(const ForwardContract& contract, double s, double r) {
    return s - std::exp(-r * contract.tau()) * contract.strike;
}

double atmrf_strike(const ForwardContract& contract, const MarketParams& params) {
    return (1.0 + params.kappa) * params.s * std::exp(params.r * contract.tau());
}

namespace {

ValuationResult finish(ValuationResult res, const MarketParams& params,
                       const ForwardContract& contract) {
    res.value = res.terminal_component + res.put_recovery_component + res.call_recovery_component;
    res.bps_per_year = res.value / (params.s * contract.tau()) * 1e4;
    return res;
}

struct RecoveryIntegrals {
    double put;
    double call;
    double abs_error;
};

// Discounted option integrals shared by the dealer and client valuations.
// Substitution w = sqrt(u - t) regularizes the sqrt behavior of d1, d2 at the
// left endpoint; the remaining integrand is smooth.
RecoveryIntegrals recovery_integrals(const ForwardContract& contract, const MarketParams& params,
                                     const DerivedRates& d, const QuadConfig& quad) {
    const double horizon = contract.tau();
    const double s = params.s;
    const double one_k = 1.0 + params.kappa;

    auto strike_at = [&](double w) {
        return contract.strike * std::exp(-params.r * (horizon - w * w)) / one_k;
    };
    auto put_integrand = [&](double w) {
        return 2.0 * w * std::exp(-d.r_hat_v * w * w) *
               bs_put_qhat(s, strike_at(w), w * w, d, params.sigma);
    };
    auto call_integrand = [&](double w) {
        return 2.0 * w * std::exp(-d.r_hat_v * w * w) *
               bs_call_qhat(s, strike_at(w), w * w, d, params.sigma);
    };

    const double w_max = std::sqrt(horizon);
    const QuadResult put_q = integrate_gk(put_integrand, 0.0, w_max, quad);
    const QuadResult call_q = integrate_gk(call_integrand, 0.0, w_max, quad);
    if (!put_q.converged || !call_q.converged) {
        throw QuadratureNonConvergence("recovery integrals did not converge to the requested "
                                       "tolerance; increase max_levels or loosen abs_tol");
    }
    return {put_q.value, call_q.value, put_q.abs_error + call_q.abs_error};
}

double terminal_component(const ForwardContract& contract, const MarketParams& params,
                          const DerivedRates& d) {
    const double horizon = contract.tau();
    return std::exp(-d.r_hat_v * horizon) *
           (params.s * std::exp(d.mu_hat * horizon) - contract.strike);
}

}  // namespace

ValuationResult price_general(const ForwardContract& contract, const MarketParams& params,
                              const FundingPolicy& policy, const QuadConfig& quad) {
    contract.validate();
    params.validate();
    policy.validate();
    require_linearizing(params, policy);

    const DerivedRates d = derive_rates(params, policy);
    const double one_k = 1.0 + params.kappa;
    const RecoveryIntegrals ri = recovery_integrals(contract, params, d, quad);

    ValuationResult res;
    res.method = Method::quadrature;
    res.terminal_component = terminal_component(contract, params, d);
    res.put_recovery_component = -d.b_hat_v * one_k * ri.put;
    res.call_recovery_component = (d.b_hat_v - d.b) * one_k * ri.call;
    res.quad_abs_error =
        (std::fabs(d.b_hat_v) + std::fabs(d.b_hat_v - d.b)) * one_k * ri.abs_error;
    return finish(res, params, contract);
}

ValuationResult price_atmrf(const ForwardContract& contract, const MarketParams& params,
                            const FundingPolicy& policy) {
    contract.validate();
    params.validate();
    policy.validate();
    require_linearizing(params, policy);

    const double k_star = atmrf_strike(contract, params);
    if (std::fabs(contract.strike / k_star - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "strike " << contract.strike << " is not the ATM risk-free strike " << k_star;
        throw NotAtmrf(os.str());
    }

    const DerivedRates d = derive_rates(params, policy);
    const double horizon = contract.tau();
    const double s = params.s;
    const double one_k = 1.0 + params.kappa;
    const double x_call = d.r_hat_v - d.mu_hat;

    ValuationResult res;
    res.method = Method::atm_closed_form;
    res.terminal_component = s * std::exp(-d.b_hat_v * horizon) *
                             (std::exp((d.mu_hat - params.r) * horizon) - one_k);
    res.put_recovery_component =
        -s * d.b_hat_v * one_k *
        (upsilon0(horizon, d.b_hat_v, -d.nu2) - upsilon0(horizon, x_call, -d.nu1));
    res.call_recovery_component =
        s * (d.b_hat_v - d.b) * one_k *
        (upsilon0(horizon, x_call, d.nu1) - upsilon0(horizon, d.b_hat_v, d.nu2));
    return finish(res, params, contract);
}

ValuationResult price_approx(const ForwardContract& contract, const MarketParams& params,
                             const FundingPolicy& policy) {
    contract.validate();
    params.validate();
    policy.validate();
    require_linearizing(params, policy);

    const DerivedRates d = derive_rates(params, policy);
    const double horizon = contract.tau();
    const double s = params.s;
    const double one_k = 1.0 + params.kappa;
    const double x_call = d.r_hat_v - d.mu_hat;

    const double k_star = atmrf_strike(contract, params);
    const double m = contract.strike / k_star;
    const double m_bar = std::log(m) / params.sigma;

    // Expansion of the recovery integrals around the ATM risk-free strike:
    // the discounted-strike legs carry the moneyness factor m and see the
    // shifted argument with opposite signs for put and call pieces.
    const double put_int = m * upsilon_tilde(horizon, d.b_hat_v, -d.nu2, m_bar) -
                           upsilon_tilde(horizon, x_call, -d.nu1, m_bar);
    const double call_int = upsilon_tilde(horizon, x_call, d.nu1, -m_bar) -
                            m * upsilon_tilde(horizon, d.b_hat_v, d.nu2, -m_bar);

    ValuationResult res;
    res.method = Method::approx;
    res.terminal_component =
        std::exp(-d.r_hat_v * horizon) * (s * std::exp(d.mu_hat * horizon) - contract.strike);
    res.put_recovery_component = -s * d.b_hat_v * one_k * put_int;
    res.call_recovery_component = s * (d.b_hat_v - d.b) * one_k * call_int;
    res.out_of_domain = (m < 0.85 || m > 1.15);
    return finish(res, params, contract);
}

ValuationResult price_client(const ForwardContract& contract, const MarketParams& params,
                             const FundingPolicy& policy, const QuadConfig& quad) {
    contract.validate();
    params.validate();
    policy.validate();
    require_linearizing(params, policy);

    const DerivedRates d = derive_rates(params, policy);
    const double one_k = 1.0 + params.kappa;
    const RecoveryIntegrals ri = recovery_integrals(contract, params, d, quad);

    // Same option integrals as the dealer value; only the coefficients move:
    // terminal flips sign, b_hat_v attaches to the call leg and the funding
    // spread to the put leg (the client pays funding on max{-z, 0}).
    ValuationResult res;
    res.method = Method::quadrature;
    res.terminal_component = -terminal_component(contract, params, d);
    res.put_recovery_component = (d.b_hat_v - d.b) * one_k * ri.put;
    res.call_recovery_component = -d.b_hat_v * one_k * ri.call;
    res.quad_abs_error =
        (std::fabs(d.b_hat_v) + std::fabs(d.b_hat_v - d.b)) * one_k * ri.abs_error;
    return finish(res, params, contract);
}

PriceBand no_arbitrage_band(const ForwardContract& contract, const MarketParams& params,
                            const FundingPolicy& policy, const QuadConfig& quad) {
    PriceBand band;
    band.dealer = price_general(contract, params, policy, quad);
    band.client = price_client(contract, params, policy, quad);
    band.lower = band.dealer.value;
    band.upper = -band.client.value;
    return band;
}

HedgeSnapshot hedge_units(const ForwardContract& contract, const MarketParams& params,
                          const FundingPolicy& policy, double s_now, double t_now,
                          const QuadConfig& quad) {
    if (!(s_now > 0.0)) throw std::invalid_argument("hedge requires s_now > 0");
    if (!(t_now >= 0.0) || !(t_now < contract.expiry))
        throw std::invalid_argument("hedge requires 0 <= t_now < T");

    ForwardContract here = contract;
    here.valuation_time = t_now;

    auto value_at = [&](double spot) {
        MarketParams p = params;
        p.s = spot;
        return price_general(here, p, policy, quad).value;
    };

    HedgeSnapshot h;
    h.value = value_at(s_now);
    const double bump = 1e-5 * s_now;
    h.delta = (value_at(s_now + bump) - value_at(s_now - bump)) / (2.0 * bump);

    const double remaining = contract.expiry - t_now;
    h.bond1_price = std::exp(-params.r1 * remaining);
    h.bond2_price = std::exp(-params.r2 * remaining);
    h.deposit_price = std::exp(params.r * t_now);
    h.funding_price = std::exp(params.f * t_now);

    const double z_kappa =
        (1.0 + params.kappa) * s_now - std::exp(-params.r * remaining) * contract.strike;
    const double bond_numerator = z_kappa - h.value - h.delta * params.kappa * s_now;

    h.stock_units = -h.delta;
    h.bond1_units = bond_numerator / h.bond1_price;
    h.bond2_units = bond_numerator / h.bond2_price;
    h.stock_outright = policy.alpha_s * h.stock_units;
    h.bond1_outright = policy.alpha1 * h.bond1_units;
    h.bond2_outright = policy.alpha2 * h.bond2_units;

    // Net cash balance of claim plus priced positions; lend the positive
    // part at r, borrow the negative part at f, never both.
    const double cash = -h.value - h.stock_outright * s_now - h.bond1_outright * h.bond1_price -
                        h.bond2_outright * h.bond2_price;
    h.deposit_units = std::max(cash, 0.0) / h.deposit_price;
    h.funding_units = std::min(cash, 0.0) / h.funding_price;
    return h;
}

}  // namespace vulnfwd
