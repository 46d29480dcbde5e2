#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace survlpb {

constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// Positivity safeguard: survival probabilities used as divisors or log
// arguments are clamped below at this floor (1/s0 with s0 = 20).
constexpr double kDefaultPositivityFloor = 0.05;

inline double clamp_floor(double s, double floor) { return s < floor ? floor : s; }

// Right-continuous nonincreasing step function on [0, inf) with values in
// [0,1] and implicit value 1 before the first knot. A curve with no knots is
// identically 1. The universal representation of fitted survival functions.
class StepSurvivalCurve {
public:
    StepSurvivalCurve() = default;
    StepSurvivalCurve(std::vector<double> knots, std::vector<double> values);

    // S(t): value at the largest knot <= t, or 1 below the first knot.
    // t may be +inf, which reads the flat tail.
    double value_at(double t) const;

    // inf{t >= 0 : S(t) <= 1 - beta}; +inf when the set is empty.
    double quantile(double beta) const;

    // quantile() for every level of an ascending grid in one sweep.
    std::vector<double> quantiles(const std::vector<double>& betas) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    double tail_value() const { return values_.empty() ? 1.0 : values_.back(); }
    std::size_t size() const { return knots_.size(); }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

// Piecewise-constant cumulative hazard: Lambda(t) = sum of increments at
// knots <= t, so Lambda(0) = 0 and Lambda is nondecreasing.
class CumulativeHazard {
public:
    CumulativeHazard() = default;
    CumulativeHazard(std::vector<double> knots, std::vector<double> increments);

    double value_at(double t) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& increments() const { return increments_; }
    const std::vector<double>& cumulative() const { return cumulative_; }
    std::size_t size() const { return knots_.size(); }

private:
    std::vector<double> knots_;
    std::vector<double> increments_;
    std::vector<double> cumulative_;
};

// Lambda(t) = -log S(t) at every knot, with S clamped below at `floor` when
// supplied. A zero value without a floor is rejected.
CumulativeHazard curve_to_cumhaz(const StepSurvivalCurve& curve,
                                 std::optional<double> floor = std::nullopt);

}  // namespace survlpb
