#pragma once

#include "vulnfwd/contract.hpp"
#include "vulnfwd/market.hpp"
#include "vulnfwd/quadrature.hpp"

namespace vulnfwd {

/// Undiscounted Black-Scholes call value under the pricing measure, where the
/// stock drifts at mu_hat = r_hat_s - kappa*b_hat_v. At tau = 0 returns the
/// payoff max(s - k, 0).
double bs_call_qhat(double s, double k, double tau, const DerivedRates& rates, double sigma);

/// Put counterpart; put-call parity: call - put = s*exp(mu_hat*tau) - k.
double bs_put_qhat(double s, double k, double tau, const DerivedRates& rates, double sigma);

/// Risk-free close-out value of the forward: s - exp(-r*(T-t))*K.
double mtm_risk_free(const ForwardContract& contract, double s, double r);

/// ATM risk-free strike K* = (1+kappa)*s*exp(r*(T-t)).
double atmrf_strike(const ForwardContract& contract, const MarketParams& params);

/// Pre-default dealer value of the vulnerable forward for any strike:
/// discounted terminal component plus put/call recovery integrals evaluated
/// by adaptive quadrature (sqrt-substituted in time-to-expiry).
/// Throws NonLinearizingPolicy unless the policy is linearizing, and
/// QuadratureNonConvergence if the tolerance is unreachable.
ValuationResult price_general(const ForwardContract& contract, const MarketParams& params,
                              const FundingPolicy& policy, const QuadConfig& quad = {});

/// Closed form at the ATM risk-free strike; agrees with price_general at K*
/// to near machine precision. Throws NotAtmrf if |K/K* - 1| > 1e-12.
ValuationResult price_atmrf(const ForwardContract& contract, const MarketParams& params,
                            const FundingPolicy& policy);

/// Second-order approximation in normalized log-moneyness, exact terminal
/// component. Flags out_of_domain outside m = K/K* in [0.85, 1.15].
ValuationResult price_approx(const ForwardContract& contract, const MarketParams& params,
                             const FundingPolicy& policy);

/// Client-side pre-default value nu(t,s) of the same contract (cash flows to
/// counterparty 2, recovery -z). Satisfies v + nu = -b*(1+kappa)*(put+call
/// integral) <= 0, with equality iff b = 0.
ValuationResult price_client(const ForwardContract& contract, const MarketParams& params,
                             const FundingPolicy& policy, const QuadConfig& quad = {});

/// No-arbitrage price interval [v, -nu] for the dealer contract.
struct PriceBand {
    double lower = 0.0;  ///< dealer value v
    double upper = 0.0;  ///< -client value
    ValuationResult dealer;
    ValuationResult client;
    double width() const { return upper - lower; }
};

PriceBand no_arbitrage_band(const ForwardContract& contract, const MarketParams& params,
                            const FundingPolicy& policy, const QuadConfig& quad = {});

/// Replicating-strategy snapshot at (t_now, s_now), pre-default. Risky-asset
/// entries are total units (outright plus repo); the outright sub-positions
/// follow from the funding policy. Deposit and funding accounts are
/// normalized to value 1 at time 0; bond prices use expiry equal to the
/// contract's (the choice cancels out of every tested identity).
struct HedgeSnapshot {
    double stock_units = 0.0;    ///< theta^S + vartheta^S = -v_s
    double bond1_units = 0.0;    ///< (z_kappa - v - v_s*kappa*s) / P1
    double bond2_units = 0.0;
    double deposit_units = 0.0;  ///< theta^B >= 0
    double funding_units = 0.0;  ///< theta^F <= 0
    double stock_outright = 0.0;
    double bond1_outright = 0.0;
    double bond2_outright = 0.0;
    double bond1_price = 0.0;
    double bond2_price = 0.0;
    double deposit_price = 0.0;
    double funding_price = 0.0;
    double value = 0.0;    ///< v(t_now, s_now)
    double delta = 0.0;    ///< v_s by central difference (relative bump 1e-5)
};

HedgeSnapshot hedge_units(const ForwardContract& contract, const MarketParams& params,
                          const FundingPolicy& policy, double s_now, double t_now,
                          const QuadConfig& quad = {});

}  // namespace vulnfwd
