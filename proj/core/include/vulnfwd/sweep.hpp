#pragma once

#include "vulnfwd/contract.hpp"
#include "vulnfwd/market.hpp"
#include "vulnfwd/quadrature.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vulnfwd {

enum class SweepMode { ctm, cts };
enum class SweepMetric { bps_per_year, raw };

/// Single-parameter sweep: the named parameter runs over the grid while
/// everything else stays at base. CTM recomputes the terminal-ATM strike per
/// point, CTS freezes it at the base parameters.
struct SweepSpec {
    std::string parameter;
    std::vector<double> grid;
    SweepMode mode = SweepMode::ctm;
    SweepMetric metric = SweepMetric::bps_per_year;

    /// Throws std::invalid_argument if the grid is empty, not strictly
    /// monotone, or the parameter name is unknown.
    void validate() const;
};

/// Two-parameter grid (CTM only, axis1 outer / axis2 inner in the output).
struct GridSpec {
    SweepSpec axis1;
    SweepSpec axis2;

    void validate() const;
};

struct SweepRow {
    double value1 = 0.0;
    std::optional<double> value2;
    bool failed = false;
    std::string failure;
    double value = 0.0;  ///< raw value units
    double terminal = 0.0;
    double put_recovery = 0.0;
    double call_recovery = 0.0;
    double spot = 1.0;     ///< s used for normalization
    double horizon = 1.0;  ///< T - t used for normalization
    std::vector<std::string> no_arb_violations;

    double bps_per_year() const { return value / (spot * horizon) * 1e4; }
};

/// Terminal at-the-money strike: K such that the terminal component of the
/// valuation vanishes, s * exp(mu_hat * (T - t)).
double tatm_strike(const MarketParams& params, const FundingPolicy& policy, double T, double t);

/// Risky stock forward s * exp(mu_hat * tau).
double risky_stock_forward(const MarketParams& params, const FundingPolicy& policy, double s,
                           double tau);

/// Names accepted by SweepSpec::parameter.
const std::vector<std::string>& sweepable_parameters();

/// Table-of-baseline sensitivity range for a parameter (61 points), when one
/// is defined; parameters without a default range need an explicit grid.
std::optional<std::pair<double, double>> default_sweep_range(const std::string& parameter);

std::vector<double> linspace(double lo, double hi, int n);

/// Prices the contract across the grid. Rows violating no-arbitrage are
/// annotated and still priced; rows whose pricing throws are marked failed
/// and the sweep continues. Cells are evaluated in parallel; output order is
/// the grid order regardless of scheduling.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const MarketParams& base_params,
                                const FundingPolicy& base_policy, double contract_expiry,
                                const QuadConfig& quad = {});

/// Joint grid, row-major (axis1 outer); CTM per cell.
std::vector<SweepRow> run_grid(const GridSpec& spec, const MarketParams& base_params,
                               const FundingPolicy& base_policy, double contract_expiry,
                               const QuadConfig& quad = {});

/// RFC-4180 CSV with 12-significant-digit floats. Columns:
/// param[, param2], value_bps_per_year, terminal_bps, put_recovery_bps,
/// call_recovery_bps, no_arb_violations (raw-unit columns under the raw
/// metric). Failed rows leave the value columns empty and carry the failure
/// reason in the annotation column.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& param1, const std::string& param2, SweepMetric metric);

}  // namespace vulnfwd
