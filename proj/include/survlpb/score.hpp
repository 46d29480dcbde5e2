#pragma once

#include <memory>
#include <span>

#include "survlpb/estimators.hpp"
#include "survlpb/grid.hpp"
#include "survlpb/step_curve.hpp"

namespace survlpb {

// Non-conformity score R(x, t), normalized to [0,1] and nondecreasing in t
// for fixed x, so {t : R(x,t) >= beta} is an interval [L, inf).
class NonConformityScore {
public:
    virtual ~NonConformityScore() = default;
    virtual double score(std::span<const double> x, double t) const = 0;
};

// Pseudo-quantile score: R(x,t) = sup{beta in grid : q(beta | x) <= t}, with
// 0 for an empty set. On grid points {R(x,T) >= beta} = {T >= q(beta | x)}.
class QuantileScore final : public NonConformityScore {
public:
    QuantileScore(std::shared_ptr<const ConditionalSurvivalModel> model, BetaGrid grid)
        : model_(std::move(model)), grid_(std::move(grid)) {}

    double score(std::span<const double> x, double t) const override {
        return score_from_curve(model_->predict_curve(x), t);
    }

    // Same score when the predicted curve for x is already at hand.
    double score_from_curve(const StepSurvivalCurve& curve, double t) const {
        // q(beta) <= t iff S(t) <= 1 - beta iff beta <= 1 - S(t), so the sup
        // is the grid floor of 1 - S(t | x).
        return grid_.floor_to_grid(1.0 - curve.value_at(t));
    }

    const ConditionalSurvivalModel& model() const { return *model_; }
    std::shared_ptr<const ConditionalSurvivalModel> model_ptr() const { return model_; }
    const BetaGrid& grid() const { return grid_; }

private:
    std::shared_ptr<const ConditionalSurvivalModel> model_;
    BetaGrid grid_;
};

// Conditional exceedance probability eta(beta, u | x), an estimate of
// P(R(X,T) >= beta | X = x, T >= u). Equals 1 at beta = 0 and is
// nonincreasing in beta.
class ConditionalExceedance {
public:
    virtual ~ConditionalExceedance() = default;
    virtual double exceedance(double beta, double u, std::span<const double> x) const = 0;
};

// Closed form for the pseudo-quantile score:
//   eta(beta, u | x) = S_T(max(q(beta|x), u) | x) / S_T(u | x),
// with the denominator clamped at the positivity floor and an exact 1
// whenever q(beta|x) <= u.
class QuantileScoreExceedance final : public ConditionalExceedance {
public:
    QuantileScoreExceedance(std::shared_ptr<const ConditionalSurvivalModel> model,
                            double positivity_floor = kDefaultPositivityFloor)
        : model_(std::move(model)), floor_(positivity_floor) {}

    double exceedance(double beta, double u, std::span<const double> x) const override {
        return from_curve(model_->predict_curve(x), beta, u);
    }

    double from_curve(const StepSurvivalCurve& curve, double beta, double u) const {
        const double q = curve.quantile(beta);
        if (q <= u) return 1.0;
        return curve.value_at(q) / clamp_floor(curve.value_at(u), floor_);
    }

    const ConditionalSurvivalModel& model() const { return *model_; }
    double positivity_floor() const { return floor_; }

private:
    std::shared_ptr<const ConditionalSurvivalModel> model_;
    double floor_;
};

// Exceedance for an arbitrary score, as the exact expectation over the jumps
// of the predicted event-time curve:
//   sum_{jumps t_j > u} 1{R(x, t_j) >= beta} * jump mass / clamp(S_T(u | x)),
// with the flat-tail mass treated as a point mass at +inf whose score is 1.
double generic_exceedance(double beta, double u, std::span<const double> x,
                          const NonConformityScore& score,
                          const ConditionalSurvivalModel& event_model,
                          double positivity_floor = kDefaultPositivityFloor);

// Same, with the predicted curve precomputed.
double generic_exceedance_from_curve(double beta, double u, std::span<const double> x,
                                     const NonConformityScore& score,
                                     const StepSurvivalCurve& curve,
                                     double positivity_floor = kDefaultPositivityFloor);

}  // namespace survlpb
