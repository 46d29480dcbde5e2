#include "survlpb/step_curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace survlpb {

StepSurvivalCurve::StepSurvivalCurve(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() != values_.size())
        throw std::invalid_argument("StepSurvivalCurve: knots/values size mismatch");
    double prev_knot = 0.0;
    double prev_value = 1.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!(knots_[i] > prev_knot) || !std::isfinite(knots_[i]))
            throw std::invalid_argument("StepSurvivalCurve: knots must be strictly increasing and positive");
        if (!(values_[i] >= 0.0) || !(values_[i] <= 1.0))
            throw std::invalid_argument("StepSurvivalCurve: values must lie in [0,1]");
        if (values_[i] > prev_value)
            throw std::invalid_argument("StepSurvivalCurve: values must be nonincreasing");
        prev_knot = knots_[i];
        prev_value = values_[i];
    }
}

double StepSurvivalCurve::value_at(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("StepSurvivalCurve::value_at: t must be >= 0");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return 1.0;
    return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double StepSurvivalCurve::quantile(double beta) const {
    if (!(beta >= 0.0) || !(beta <= 1.0))
        throw std::invalid_argument("StepSurvivalCurve::quantile: beta must lie in [0,1]");
    const double threshold = 1.0 - beta;
    if (1.0 <= threshold) return 0.0;  // S(0) = 1 already qualifies
    // First knot whose value drops to the threshold; values are nonincreasing.
    auto it = std::partition_point(values_.begin(), values_.end(),
                                   [threshold](double v) { return v > threshold; });
    if (it == values_.end()) return kInfiniteTime;
    return knots_[static_cast<std::size_t>(it - values_.begin())];
}

std::vector<double> StepSurvivalCurve::quantiles(const std::vector<double>& betas) const {
    std::vector<double> out(betas.size());
    std::size_t j = 0;  // advances with beta since thresholds 1-beta descend
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double beta = betas[i];
        if (!(beta >= 0.0) || !(beta <= 1.0))
            throw std::invalid_argument("StepSurvivalCurve::quantiles: beta must lie in [0,1]");
        if (i > 0 && betas[i] < betas[i - 1])
            throw std::invalid_argument("StepSurvivalCurve::quantiles: betas must be ascending");
        const double threshold = 1.0 - beta;
        if (1.0 <= threshold) {
            out[i] = 0.0;
            continue;
        }
        while (j < values_.size() && values_[j] > threshold) ++j;
        out[i] = j < values_.size() ? knots_[j] : kInfiniteTime;
    }
    return out;
}

CumulativeHazard::CumulativeHazard(std::vector<double> knots, std::vector<double> increments)
    : knots_(std::move(knots)), increments_(std::move(increments)) {
    if (knots_.size() != increments_.size())
        throw std::invalid_argument("CumulativeHazard: knots/increments size mismatch");
    double prev_knot = 0.0;
    double running = 0.0;
    cumulative_.reserve(knots_.size());
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!(knots_[i] > prev_knot) || !std::isfinite(knots_[i]))
            throw std::invalid_argument("CumulativeHazard: knots must be strictly increasing and positive");
        if (!(increments_[i] >= 0.0))
            throw std::invalid_argument("CumulativeHazard: increments must be nonnegative");
        prev_knot = knots_[i];
        running += increments_[i];
        cumulative_.push_back(running);
    }
}

double CumulativeHazard::value_at(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("CumulativeHazard::value_at: t must be >= 0");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

CumulativeHazard curve_to_cumhaz(const StepSurvivalCurve& curve, std::optional<double> floor) {
    std::vector<double> increments;
    increments.reserve(curve.size());
    double prev_log = 0.0;  // log S(0) = 0
    for (std::size_t i = 0; i < curve.size(); ++i) {
        double v = curve.values()[i];
        if (floor) {
            v = clamp_floor(v, *floor);
        } else if (!(v > 0.0)) {
            throw std::invalid_argument("curve_to_cumhaz: zero survival value requires a positivity floor");
        }
        double lg = std::log(v);
        // Clamping can only raise values, so increments stay nonnegative.
        increments.push_back(std::max(0.0, prev_log - lg));
        prev_log = lg;
    }
    return CumulativeHazard(curve.knots(), std::move(increments));
}

}  // namespace survlpb
