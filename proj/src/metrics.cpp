#include "survlpb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace survlpb {

double oracle_coverage(const std::vector<FullRecord>& test_full, const LowerBoundFn& lpb) {
    if (test_full.empty()) throw std::invalid_argument("oracle_coverage: empty test set");
    std::size_t hits = 0;
    for (const auto& rec : test_full)
        if (rec.event_time >= lpb(rec.covariates)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(test_full.size());
}

namespace {

std::optional<double> hajek_ratio(const Dataset& test,
                                  const std::function<bool(const ObservedRecord&)>& covered,
                                  const SurvivalEvaluator& censor_model, double floor) {
    if (test.empty()) throw std::invalid_argument("ipcw_coverage_metric: empty test set");
    double numer = 0.0;
    double denom = 0.0;
    for (const auto& rec : test.records()) {
        if (!rec.event) continue;
        const double w =
            1.0 / clamp_floor(censor_model.survival_at(rec.covariates, rec.time), floor);
        denom += w;
        if (covered(rec)) numer += w;
    }
    if (denom == 0.0) return std::nullopt;
    return numer / denom;
}

}  // namespace

std::optional<double> ipcw_coverage_metric(const Dataset& test, const NonConformityScore& score,
                                           const SurvivalEvaluator& censor_model, double beta_hat,
                                           double positivity_floor) {
    return hajek_ratio(
        test,
        [&](const ObservedRecord& rec) {
            return score.score(rec.covariates, rec.time) >= beta_hat;
        },
        censor_model, positivity_floor);
}

std::optional<double> ipcw_coverage_metric(const Dataset& test, const LowerBoundFn& lpb,
                                           const SurvivalEvaluator& censor_model,
                                           double positivity_floor) {
    return hajek_ratio(
        test, [&](const ObservedRecord& rec) { return rec.time >= lpb(rec.covariates); },
        censor_model, positivity_floor);
}

double or_coverage_metric(const Dataset& test, const ConditionalSurvivalModel& survival_model,
                          const ConditionalSurvivalModel& quantile_model, double beta_hat) {
    if (test.empty()) throw std::invalid_argument("or_coverage_metric: empty test set");
    double total = 0.0;
    for (const auto& rec : test.records()) {
        const double q = quantile_model.predict_curve(rec.covariates).quantile(beta_hat);
        const auto curve = survival_model.predict_curve(rec.covariates);
        total += q == kInfiniteTime ? curve.tail_value() : curve.value_at(q);
    }
    return total / static_cast<double>(test.size());
}

std::optional<double> aipcw_coverage_metric(const Dataset& test, const NonConformityScore& score,
                                            const ConditionalSurvivalModel& censor_model,
                                            const ConditionalExceedance& eta, double beta_hat,
                                            double positivity_floor) {
    auto base = ipcw_coverage_metric(test, score, censor_model, beta_hat, positivity_floor);
    if (!base) return std::nullopt;
    const double center = *base;

    const auto censor_times = distinct_censoring_times(test);
    const auto* quantile_eta = dynamic_cast<const QuantileScoreExceedance*>(&eta);
    double weight_sum = 0.0;
    double augmentation = 0.0;
    for (const auto& rec : test.records()) {
        const auto curve = censor_model.predict_curve(rec.covariates);
        if (rec.event)
            weight_sum += 1.0 / clamp_floor(curve.value_at(rec.time), positivity_floor);
        const auto dm =
            censoring_martingale_increments(rec, curve, censor_times, positivity_floor);
        // One event-curve prediction per subject on the pseudo-quantile path.
        StepSurvivalCurve event_curve;
        if (quantile_eta) event_curve = quantile_eta->model().predict_curve(rec.covariates);
        for (std::size_t k = 0; k < censor_times.size(); ++k) {
            const double sc = clamp_floor(curve.value_at(censor_times[k]), positivity_floor);
            const double ex =
                quantile_eta ? quantile_eta->from_curve(event_curve, beta_hat, censor_times[k])
                             : eta.exceedance(beta_hat, censor_times[k], rec.covariates);
            augmentation += (ex - center) / sc * dm[k];
        }
    }
    return center + augmentation / weight_sum;
}

LpbSummary lpb_summary(std::span<const double> bounds) {
    LpbSummary out;
    std::vector<double> finite;
    finite.reserve(bounds.size());
    for (double b : bounds) {
        if (std::isfinite(b))
            finite.push_back(b);
        else
            ++out.sentinel_count;
    }
    out.finite_count = finite.size();
    if (finite.empty()) {
        out.mean = out.median = out.lower_quartile = out.upper_quartile =
            std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    std::sort(finite.begin(), finite.end());
    double total = 0.0;
    for (double b : finite) total += b;
    out.mean = total / static_cast<double>(finite.size());
    auto interp = [&](double p) {
        // type-7 order statistic with linear interpolation
        const double h = p * (static_cast<double>(finite.size()) - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, finite.size() - 1);
        const double frac = h - std::floor(h);
        return finite[lo] * (1.0 - frac) + finite[hi] * frac;
    };
    out.median = interp(0.5);
    out.lower_quartile = interp(0.25);
    out.upper_quartile = interp(0.75);
    return out;
}

}  // namespace survlpb
