#pragma once

#include <stdexcept>
#include <string>

namespace lacunary {

// A term would need more bits than the configured cap. Signals the caller to
// switch to the reduced tower rule or to the symbolic counting path.
struct TowerOverflow : std::runtime_error {
    explicit TowerOverflow(const std::string& what) : std::runtime_error(what) {}
};

// Input sequence violates strict monotonicity (ratio <= 1 somewhere).
struct NotIncreasing : std::runtime_error {
    explicit NotIncreasing(const std::string& what) : std::runtime_error(what) {}
};

// A spectrum/profile request would enumerate more index pairs than allowed.
struct PairBudgetExceeded : std::runtime_error {
    explicit PairBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Weight vector handed to a CLT experiment does not satisfy sum of squares = 1.
struct WeightsNotNormalized : std::runtime_error {
    explicit WeightsNotNormalized(const std::string& what) : std::runtime_error(what) {}
};

// Structural count prediction requested for coefficients it does not cover.
struct InvalidCase : std::runtime_error {
    explicit InvalidCase(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lacunary
