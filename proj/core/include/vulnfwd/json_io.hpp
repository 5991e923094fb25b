#pragma once

#include "vulnfwd/contract.hpp"
#include "vulnfwd/market.hpp"

#include <string>
#include <vector>

namespace vulnfwd {

/// How the contract strike was given: an explicit number, or a rule resolved
/// against the market ("tatm" = terminal at-the-money, "atmrf" = ATM
/// risk-free).
enum class StrikeRule { explicit_value, tatm, atmrf };

/// Parsed configuration document: market, funding policy, contract.
struct RunConfig {
    MarketParams market;
    FundingPolicy policy;
    ForwardContract contract;
    StrikeRule strike_rule = StrikeRule::explicit_value;
    std::vector<std::string> warnings;  ///< accepted-but-unused keys, etc.

    /// Value equality over market, policy and the resolved contract.
    bool operator==(const RunConfig& other) const;
};

/// Parses a config document:
///   {"market": {s, r, f, q, sigma, h_s, h1, h2, r1, r2, lambda1, lambda2,
///               kappa, mu}, "policy": {"alpha": x} | {alpha_s, alpha1,
///    alpha2}, "contract": {"strike": number|"tatm"|"atmrf", "expiry",
///    "valuation_time"}}
/// mu defaults to r when absent. A scalar-alpha policy implies the
/// linearizing split. Rule strikes are resolved immediately. Unknown keys are
/// rejected except bond expiries t1/t2, which are accepted and flagged as
/// unused. Throws std::invalid_argument on malformed input.
RunConfig parse_config_text(const std::string& json_text);

/// Canonical JSON echo of a config; reparses to an equal RunConfig.
std::string config_to_json_text(const RunConfig& config);

}  // namespace vulnfwd
