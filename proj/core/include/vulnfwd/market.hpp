#pragma once

#include <string>
#include <vector>

namespace vulnfwd {

/// All exogenous model inputs: flat rates, lognormal stock dynamics with a
/// single downward jump of relative size kappa at the first default, and
/// independent Poisson default arrivals for the two counterparties.
///
/// Units: rates and intensities are per year, sigma per sqrt(year).
struct MarketParams {
    double s = 1.0;        ///< spot stock price, > 0
    double r = 0.0;        ///< deposit (risk-free) rate
    double f = 0.0;        ///< unsecured funding rate
    double q = 0.0;        ///< dividend rate
    double sigma = 0.2;    ///< stock volatility, > 0
    double h_s = 0.0;      ///< stock repo rate
    double h1 = 0.0;       ///< bond 1 repo rate
    double h2 = 0.0;       ///< bond 2 repo rate
    double r1 = 0.0;       ///< bond 1 return rate
    double r2 = 0.0;       ///< bond 2 return rate
    double lambda1 = 0.0;  ///< default intensity, counterparty 1, >= 0
    double lambda2 = 0.0;  ///< default intensity, counterparty 2, >= 0
    double kappa = 0.0;    ///< relative price jump at first default, in (-1, 0]
    double mu = 0.0;       ///< physical drift (P-measure simulation only)

    // Recovery rates are pinned to 1 (symmetric full-MTM close-out). The
    // fields stay so configs naming them are checked rather than ignored.
    double recovery1 = 1.0;
    double recovery2 = 1.0;

    /// Throws std::invalid_argument on structural violations: s, sigma > 0;
    /// lambda_i >= 0; kappa in (-1, 0]; recovery_i == 1; all finite.
    void validate() const;
};

/// Fraction of each exposure funded through the bank accounts rather than
/// repos. The linearizing policy ties alpha_s to the jump size.
struct FundingPolicy {
    double alpha_s = 0.0;
    double alpha1 = 0.5;
    double alpha2 = 0.5;

    /// The policy that makes the pricing problem linear:
    /// alpha1 = alpha, alpha2 = 1 - alpha, alpha_s = -kappa.
    static FundingPolicy linearizing(double alpha, double kappa);

    /// True iff alpha1 + alpha2 == 1 and alpha_s == -kappa (tolerance 1e-12).
    bool is_linearizing(double kappa) const;

    /// Throws std::invalid_argument unless every component lies in [0, 1].
    void validate() const;
};

/// Rates derived from a (params, policy) pair; see derive_rates.
struct DerivedRates {
    double r_hat_s;   ///< alpha_s*r + (1-alpha_s)*h_s - q
    double b_hat_1;   ///< alpha1*r + (1-alpha1)*h1 - r1
    double b_hat_2;   ///< alpha2*r + (1-alpha2)*h2 - r2
    double r_hat_v;   ///< r - (b_hat_1 + b_hat_2)
    double b_hat_v;   ///< r_hat_v - r
    double b;         ///< f - r
    double mu_hat;    ///< r_hat_s - kappa*b_hat_v (risk-adjusted stock drift)
    double nu1;       ///< (mu_hat - r + sigma^2/2) / sigma
    double nu2;       ///< nu1 - sigma
    double c1;        ///< 2*(r_hat_v - mu_hat) + nu1^2
    double c2;        ///< 2*b_hat_v + nu2^2 (equals c1 algebraically)
};

/// One violated no-arbitrage inequality, e.g. "r <= h_s" with the two sides.
struct NoArbViolation {
    std::string condition;
    double lhs;
    double rhs;

    std::string describe() const;
};

/// Checks r <= h <= f for h in {h_s, h1, h2} and h_i < r_i. Never throws;
/// NaN inputs are reported as violations. Empty result means arbitrage-free.
std::vector<NoArbViolation> validate_no_arbitrage(const MarketParams& params);

/// Deterministic, total on valid inputs. b_hat_v = -(b_hat_1 + b_hat_2) holds
/// bit-exactly by construction.
DerivedRates derive_rates(const MarketParams& params, const FundingPolicy& policy);

/// Throws NonLinearizingPolicy unless policy.is_linearizing(params.kappa).
void require_linearizing(const MarketParams& params, const FundingPolicy& policy);

/// Correlation between the stock price and the first-to-default indicator at
/// horizon t under the physical measure (closed form). Returns 0 in the
/// degenerate cases t <= 0 or lambda1 + lambda2 == 0 where the indicator has
/// zero variance.
double stock_default_correlation(const MarketParams& params, double t);

}  // namespace vulnfwd
