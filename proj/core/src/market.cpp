#include "vulnfwd/market.hpp"

#include "vulnfwd/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vulnfwd {

namespace {

bool all_finite(const MarketParams& p) {
    const double vals[] = {p.s, p.r, p.f, p.q, p.sigma, p.h_s, p.h1, p.h2,
                           p.r1, p.r2, p.lambda1, p.lambda2, p.kappa, p.mu,
                           p.recovery1, p.recovery2};
    for (double v : vals)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

void MarketParams::validate() const {
    if (!all_finite(*this)) throw std::invalid_argument("market params must be finite");
    if (!(s > 0.0)) throw std::invalid_argument("spot s must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("volatility sigma must be > 0");
    if (lambda1 < 0.0 || lambda2 < 0.0)
        throw std::invalid_argument("default intensities must be >= 0");
    // kappa = -1 sends the stock to zero at default and breaks measure
    // equivalence; kappa > 0 makes the linearizing policy infeasible.
    if (!(kappa > -1.0) || kappa > 0.0)
        throw std::invalid_argument("jump size kappa must lie in (-1, 0]");
    if (recovery1 != 1.0 || recovery2 != 1.0)
        throw std::invalid_argument("recovery rates are fixed to 1 (full-MTM close-out)");
}

FundingPolicy FundingPolicy::linearizing(double alpha, double kappa) {
    FundingPolicy p;
    p.alpha1 = alpha;
    p.alpha2 = 1.0 - alpha;
    p.alpha_s = -kappa;
    return p;
}

bool FundingPolicy::is_linearizing(double kappa) const {
    return std::fabs(alpha1 + alpha2 - 1.0) <= 1e-12 && std::fabs(alpha_s + kappa) <= 1e-12;
}

void FundingPolicy::validate() const {
    const double vals[] = {alpha_s, alpha1, alpha2};
    for (double a : vals) {
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("funding policy components must lie in [0, 1]");
    }
}

std::string NoArbViolation::describe() const {
    std::ostringstream os;
    os << condition << " violated (" << lhs << " vs " << rhs << ")";
    return os.str();
}

std::vector<NoArbViolation> validate_no_arbitrage(const MarketParams& p) {
    std::vector<NoArbViolation> out;
    // r <= h <= f for every repo rate; h_i < r_i for the bonds. Comparisons
    // are written so NaN on either side registers as a violation.
    const struct {
        const char* name;
        double h;
    } repos[] = {{"h_s", p.h_s}, {"h1", p.h1}, {"h2", p.h2}};
    for (const auto& rep : repos) {
        if (!(p.r <= rep.h)) out.push_back({std::string("r <= ") + rep.name, p.r, rep.h});
        if (!(rep.h <= p.f)) out.push_back({std::string(rep.name) + " <= f", rep.h, p.f});
    }
    if (!(p.h1 < p.r1)) out.push_back({"h1 < r1", p.h1, p.r1});
    if (!(p.h2 < p.r2)) out.push_back({"h2 < r2", p.h2, p.r2});
    return out;
}

DerivedRates derive_rates(const MarketParams& p, const FundingPolicy& policy) {
    DerivedRates d;
    d.r_hat_s = policy.alpha_s * p.r + (1.0 - policy.alpha_s) * p.h_s - p.q;
    d.b_hat_1 = policy.alpha1 * p.r + (1.0 - policy.alpha1) * p.h1 - p.r1;
    d.b_hat_2 = policy.alpha2 * p.r + (1.0 - policy.alpha2) * p.h2 - p.r2;
    d.b_hat_v = -(d.b_hat_1 + d.b_hat_2);
    d.r_hat_v = p.r + d.b_hat_v;
    d.b = p.f - p.r;
    d.mu_hat = d.r_hat_s - p.kappa * d.b_hat_v;
    d.nu1 = (d.mu_hat - p.r + 0.5 * p.sigma * p.sigma) / p.sigma;
    d.nu2 = d.nu1 - p.sigma;
    d.c1 = 2.0 * (d.r_hat_v - d.mu_hat) + d.nu1 * d.nu1;
    d.c2 = 2.0 * d.b_hat_v + d.nu2 * d.nu2;
    return d;
}

void require_linearizing(const MarketParams& params, const FundingPolicy& policy) {
    if (!policy.is_linearizing(params.kappa)) {
        std::ostringstream os;
        os << "pricing requires the linearizing funding policy (alpha1 + alpha2 = 1, "
              "alpha_s = -kappa); got alpha_s=" << policy.alpha_s << " alpha1=" << policy.alpha1
           << " alpha2=" << policy.alpha2 << " for kappa=" << params.kappa;
        throw NonLinearizingPolicy(os.str());
    }
}

double stock_default_correlation(const MarketParams& p, double t) {
    const double lambda = p.lambda1 + p.lambda2;
    if (t <= 0.0 || lambda <= 0.0 || p.kappa == 0.0) {
        // Var(J_t) = 0 (or a zero jump): define the correlation as 0 by
        // continuity instead of returning NaN.
        return 0.0;
    }
    const double pj = -std::expm1(-lambda * t);  // P(first default <= t)
    const double k = p.kappa;
    // Denominator is Var(S_t) stripped of the common s^2 e^{2(mu-q)t} factor,
    // which cancels against E(S^0_t) in the correlation.
    const double den = std::exp(p.sigma * p.sigma * t) * (1.0 + k * pj * (2.0 + k)) -
                       (1.0 + k * pj * (2.0 + k * pj));
    if (den <= 0.0) return 0.0;  // not reachable for valid sigma > 0, t > 0
    return k * std::sqrt(pj * (1.0 - pj) / den);
}

}  // namespace vulnfwd
