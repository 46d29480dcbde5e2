#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "survlpb/data.hpp"
#include "survlpb/estimators.hpp"
#include "survlpb/grid.hpp"
#include "survlpb/score.hpp"

namespace survlpb {

enum class Method { HT_IPCW, IPCW, AIPCW, OR, COR };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct CalibrationConfig {
    double alpha = 0.1;
    BetaGrid grid;
    double positivity_floor = kDefaultPositivityFloor;
};

// Output of a calibration pass: the selected level, whether the selection
// was degenerate (no grid point qualified), and the per-level diagnostics.
// `margin` holds the selection statistic per grid level: the estimating
// function W(beta) for IPCW/AIPCW, the coverage estimate for HT_IPCW, and
// the mean predicted survival at the quantile for COR. `augmentation` holds
// Pi(beta) for AIPCW.
struct CalibrationResult {
    Method method = Method::IPCW;
    double alpha = 0.0;
    double beta_hat = 0.0;
    bool degenerate = false;
    std::vector<double> margin;
    std::vector<double> augmentation;

    std::string to_json() const;
};

// Horvitz-Thompson IPCW estimate of P(R >= beta): the complete-case average
// of 1{score >= beta} weighted by 1 / clamp(S_C(Y | X)). May exceed 1.
double ht_ipcw_coverage(const Dataset& calib, const NonConformityScore& score,
                        const SurvivalEvaluator& censor_model, double beta,
                        double positivity_floor = kDefaultPositivityFloor);

// Hajek estimating function
//   W(beta) = (1/n) sum Delta_i (1{score_i >= beta} - (1-alpha)) / clamp(S_C(Y_i|X_i)).
// Selecting the largest level with W >= 0 is algebraically identical to
// thresholding the ratio-form coverage estimate at 1 - alpha.
double hajek_margin(const Dataset& calib, const NonConformityScore& score,
                    const SurvivalEvaluator& censor_model, double beta, double alpha,
                    double positivity_floor = kDefaultPositivityFloor);

struct LevelSelection {
    double beta = 0.0;
    bool degenerate = false;
};

// Largest grid level whose statistic clears `threshold`; the grid minimum
// with the degenerate flag when none does.
LevelSelection select_level(const BetaGrid& grid, std::span<const double> stats,
                            double threshold = 0.0);

// Distinct ascending censoring times (Delta = 0) of a sample; the support of
// the estimated censoring martingale.
std::vector<double> distinct_censoring_times(const Dataset& data);

// Increments M(u_k) - M(u_{k-1}) of the estimated censoring martingale
//   M(u) = 1{Y <= u, Delta = 0} + log clamp(S_C(Y ^ u | X)),
// over the given ascending censoring times, with M(u_0 = 0) = 0.
std::vector<double> censoring_martingale_increments(const ObservedRecord& rec,
                                                    const StepSurvivalCurve& censor_curve,
                                                    std::span<const double> censor_times,
                                                    double positivity_floor = kDefaultPositivityFloor);

// Augmentation term
//   Pi(beta) = (1/n) sum_i sum_k (eta(beta, u_k | X_i) - (1-alpha))
//              / clamp(S_C(u_k | X_i)) * dM_k(X_i),
// with censoring times taken from the calibration sample itself.
double augmentation_term(const Dataset& calib, const ConditionalExceedance& eta,
                         const ConditionalSurvivalModel& censor_model, double beta, double alpha,
                         double positivity_floor = kDefaultPositivityFloor);

// One calibration pass over the grid. Nuisances are per method: censoring
// model for HT_IPCW/IPCW/AIPCW, exceedance for AIPCW, event-time survival
// model for COR. OR ignores the data entirely and returns the largest grid
// level at or below alpha.
CalibrationResult calibrate(const Dataset& calib, const NonConformityScore& score,
                            const ConditionalSurvivalModel* censor_model,
                            const ConditionalExceedance* eta,
                            const ConditionalSurvivalModel* survival_model,
                            const CalibrationConfig& config, Method method);

// Influence function of the coverage functional at level beta, data-driven
// (finite-sum) convention; both algebraic forms. `score_value` is R(X, T),
// which the first form only reads through Delta * 1{score >= beta}.
double influence_function(const ObservedRecord& rec, const StepSurvivalCurve& censor_curve,
                          const ConditionalExceedance& eta, std::span<const double> censor_times,
                          double score_value, double beta, double alpha,
                          double positivity_floor = kDefaultPositivityFloor);

double influence_function_lemma_form(const ObservedRecord& rec,
                                     const StepSurvivalCurve& censor_curve,
                                     const ConditionalExceedance& eta,
                                     std::span<const double> censor_times, double score_value,
                                     double beta, double alpha,
                                     double positivity_floor = kDefaultPositivityFloor);

// Lower predictive bound evaluator produced by calibration. The prediction
// region for x is {t : R(x,t) >= beta_hat}; with the pseudo-quantile score
// the lower end is q(beta_hat | x) directly.
class LPBModel {
public:
    LPBModel(std::shared_ptr<const ConditionalSurvivalModel> quantile_model, double beta_hat);
    LPBModel(std::shared_ptr<const NonConformityScore> score, double beta_hat, double horizon);

    // q(beta_hat | x), or +inf when the curve never reaches 1 - beta_hat.
    double lower_bound(std::span<const double> x) const;

    double beta_hat() const { return beta_hat_; }
    const ConditionalSurvivalModel* quantile_model() const { return quantile_model_.get(); }

private:
    std::shared_ptr<const ConditionalSurvivalModel> quantile_model_;
    std::shared_ptr<const NonConformityScore> score_;
    double beta_hat_;
    double horizon_ = 0.0;
};

}  // namespace survlpb
