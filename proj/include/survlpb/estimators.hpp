#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "survlpb/data.hpp"
#include "survlpb/step_curve.hpp"

namespace survlpb {

// Which law a conditional survival fit targets. EventTime fits on (Y, Delta);
// CensoringTime fits on (Y, 1 - Delta).
enum class TargetKind { EventTime, CensoringTime };

// Anything that can report a conditional survival probability S(t | x).
class SurvivalEvaluator {
public:
    virtual ~SurvivalEvaluator() = default;
    virtual double survival_at(std::span<const double> x, double t) const = 0;
};

// Fitted conditional survival model: maps a covariate vector to a step
// survival curve. Immutable after fitting; predict_curve is reentrant.
class ConditionalSurvivalModel : public SurvivalEvaluator {
public:
    virtual StepSurvivalCurve predict_curve(std::span<const double> x) const = 0;

    double survival_at(std::span<const double> x, double t) const override {
        return predict_curve(x).value_at(t);
    }
};

// Marginal Kaplan-Meier product-limit fit; predictions ignore x.
// Conventions: no relevant events gives the constant-1 curve; a flat tail is
// kept when the largest observation is censored.
class KaplanMeierModel final : public ConditionalSurvivalModel {
public:
    explicit KaplanMeierModel(StepSurvivalCurve curve) : curve_(std::move(curve)) {}
    StepSurvivalCurve predict_curve(std::span<const double>) const override { return curve_; }
    const StepSurvivalCurve& curve() const { return curve_; }

private:
    StepSurvivalCurve curve_;
};

std::shared_ptr<KaplanMeierModel> km_fit(const Dataset& data, TargetKind target);

struct NewtonConfig {
    double tol = 1e-8;    // gradient L2 norm at convergence
    int max_iter = 100;
    int max_halvings = 40;
};

struct CoxFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cox proportional hazards fit: Breslow-ties partial likelihood maximized by
// Newton with step-halving, covariates centered at training means, baseline
// cumulative hazard by the Breslow estimator.
class CoxModel final : public ConditionalSurvivalModel {
public:
    CoxModel(std::vector<double> coefficients, std::vector<double> covariate_means,
             CumulativeHazard baseline);

    StepSurvivalCurve predict_curve(std::span<const double> x) const override;
    double survival_at(std::span<const double> x, double t) const override;

    // (x - mean) . coefficients
    double linear_predictor(std::span<const double> x) const;

    const std::vector<double>& coefficients() const { return coefficients_; }
    const std::vector<double>& covariate_means() const { return means_; }
    const CumulativeHazard& baseline_cumhaz() const { return baseline_; }

    int iterations = 0;
    double final_gradient_norm = 0.0;
    std::vector<double> loglik_trace;  // partial likelihood after each Newton step

    std::string to_json() const;
    static std::shared_ptr<CoxModel> from_json(const std::string& text);

private:
    std::vector<double> coefficients_;
    std::vector<double> means_;
    CumulativeHazard baseline_;
};

std::shared_ptr<CoxModel> cox_fit(const Dataset& data, TargetKind target,
                                  const NewtonConfig& config = {});

// Localized Kaplan-Meier: for a query x, run the product-limit estimator on
// the k nearest training records under Euclidean distance on covariates
// standardized by training means and standard deviations. Ties in distance
// break deterministically by record index.
class KnnKaplanMeierModel final : public ConditionalSurvivalModel {
public:
    KnnKaplanMeierModel(Dataset training, TargetKind target, std::size_t k);
    StepSurvivalCurve predict_curve(std::span<const double> x) const override;

    std::size_t k() const { return k_; }

private:
    Dataset training_;
    TargetKind target_;
    std::size_t k_;
    std::vector<double> means_;
    std::vector<double> inv_sd_;
};

std::shared_ptr<KnnKaplanMeierModel> knn_km_fit(const Dataset& data, TargetKind target,
                                                std::size_t k);

// Bias/variance default at the n ~ 1000 scale: k = min(n, max(50, ceil(0.2 n))).
std::size_t knn_default_k(std::size_t n);

// Generic model (de)serialization for the fits that admit a closed form.
std::string model_to_json(const ConditionalSurvivalModel& model);
std::shared_ptr<ConditionalSurvivalModel> model_from_json(const std::string& text);

}  // namespace survlpb
