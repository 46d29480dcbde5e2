#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survlpb/calibrate.hpp"
#include "survlpb/data.hpp"
#include "survlpb/estimators.hpp"
#include "survlpb/score.hpp"

namespace survlpb {

using LowerBoundFn = std::function<double(std::span<const double>)>;

// One evaluated coverage figure. IPCW-style weighting can exceed 1 in
// principle; Oracle/Hajek/OR kinds stay in [0,1].
struct CoverageReport {
    std::string method;
    std::string estimator;
    std::string metric;
    double coverage = 0.0;
    std::size_t n_test = 0;
    double mean_lpb = 0.0;
    double median_lpb = 0.0;
};

// Fraction of test events at or above the bound; +inf bounds count as
// misses, -inf bounds as hits.
double oracle_coverage(const std::vector<FullRecord>& test_full, const LowerBoundFn& lpb);

// Hajek-weighted fraction of observed failures with R(X_i, T_i) >= beta_hat;
// empty (0/0) when the test set has no events.
std::optional<double> ipcw_coverage_metric(const Dataset& test, const NonConformityScore& score,
                                           const SurvivalEvaluator& censor_model, double beta_hat,
                                           double positivity_floor = kDefaultPositivityFloor);

// Same with a generic lower bound: the indicator is 1{Y_i >= L(X_i)}.
std::optional<double> ipcw_coverage_metric(const Dataset& test, const LowerBoundFn& lpb,
                                           const SurvivalEvaluator& censor_model,
                                           double positivity_floor = kDefaultPositivityFloor);

// Mean predicted survival at the pseudo-quantile bound,
// (1/n) sum S_T(q(beta_hat | X_i) | X_i).
double or_coverage_metric(const Dataset& test, const ConditionalSurvivalModel& survival_model,
                          const ConditionalSurvivalModel& quantile_model, double beta_hat);

// Hajek IPCW coverage plus a martingale augmentation centered at the IPCW
// estimate itself and normalized by the summed weights (one-step correction
// around the ratio estimator); censoring times come from the test split.
std::optional<double> aipcw_coverage_metric(const Dataset& test, const NonConformityScore& score,
                                            const ConditionalSurvivalModel& censor_model,
                                            const ConditionalExceedance& eta, double beta_hat,
                                            double positivity_floor = kDefaultPositivityFloor);

struct LpbSummary {
    std::size_t finite_count = 0;
    std::size_t sentinel_count = 0;  // non-finite bounds
    double mean = 0.0;
    double median = 0.0;
    double lower_quartile = 0.0;
    double upper_quartile = 0.0;
};

LpbSummary lpb_summary(std::span<const double> bounds);

}  // namespace survlpb
