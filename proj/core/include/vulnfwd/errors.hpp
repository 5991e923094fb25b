#pragma once

#include <stdexcept>
#include <string>

namespace vulnfwd {

/// Pricing formulas in this library require the linearizing funding policy.
class NonLinearizingPolicy : public std::invalid_argument {
public:
    explicit NonLinearizingPolicy(const std::string& what) : std::invalid_argument(what) {}
};

/// Closed-form pricing called with a strike away from the ATM risk-free level.
class NotAtmrf : public std::invalid_argument {
public:
    explicit NotAtmrf(const std::string& what) : std::invalid_argument(what) {}
};

/// Adaptive quadrature hit its subdivision limit above the requested tolerance.
class QuadratureNonConvergence : public std::runtime_error {
public:
    explicit QuadratureNonConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// Finite-difference grid too coarse for the requested tolerance (Richardson check).
class GridTooCoarse : public std::runtime_error {
public:
    explicit GridTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

/// All sampled paths share the same default state; correlation undefined.
class DegenerateVariance : public std::runtime_error {
public:
    explicit DegenerateVariance(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vulnfwd
