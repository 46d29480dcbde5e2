#include "survlpb/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace survlpb {

std::string method_name(Method m) {
    switch (m) {
        case Method::HT_IPCW: return "ht_ipcw";
        case Method::IPCW: return "ipcw";
        case Method::AIPCW: return "aipcw";
        case Method::OR: return "or";
        case Method::COR: return "cor";
    }
    throw std::logic_error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "ht_ipcw") return Method::HT_IPCW;
    if (name == "ipcw") return Method::IPCW;
    if (name == "aipcw") return Method::AIPCW;
    if (name == "or") return Method::OR;
    if (name == "cor") return Method::COR;
    throw std::invalid_argument("unknown calibration method '" + name + "'");
}

std::string CalibrationResult::to_json() const {
    nlohmann::json j;
    j["method"] = method_name(method);
    j["alpha"] = alpha;
    j["beta_hat"] = beta_hat;
    j["degenerate"] = degenerate;
    j["margin"] = margin;
    j["augmentation"] = augmentation;
    return j.dump();
}

double ht_ipcw_coverage(const Dataset& calib, const NonConformityScore& score,
                        const SurvivalEvaluator& censor_model, double beta,
                        double positivity_floor) {
    if (calib.empty()) throw std::invalid_argument("ht_ipcw_coverage: empty calibration set");
    double sum = 0.0;
    for (const auto& rec : calib.records()) {
        if (!rec.event) continue;
        const double sc = clamp_floor(censor_model.survival_at(rec.covariates, rec.time),
                                      positivity_floor);
        if (score.score(rec.covariates, rec.time) >= beta) sum += 1.0 / sc;
    }
    return sum / static_cast<double>(calib.size());
}

double hajek_margin(const Dataset& calib, const NonConformityScore& score,
                    const SurvivalEvaluator& censor_model, double beta, double alpha,
                    double positivity_floor) {
    if (calib.empty()) throw std::invalid_argument("hajek_margin: empty calibration set");
    // Accumulated as alpha * (weights above) - (1-alpha) * (weights below):
    // algebraically the centered sum, but exact at coverage boundaries where
    // the weighted fraction ties with 1 - alpha.
    double above = 0.0;
    double below = 0.0;
    for (const auto& rec : calib.records()) {
        if (!rec.event) continue;
        const double w = 1.0 / clamp_floor(censor_model.survival_at(rec.covariates, rec.time),
                                           positivity_floor);
        if (score.score(rec.covariates, rec.time) >= beta)
            above += w;
        else
            below += w;
    }
    return (alpha * above - (1.0 - alpha) * below) / static_cast<double>(calib.size());
}

LevelSelection select_level(const BetaGrid& grid, std::span<const double> stats,
                            double threshold) {
    if (stats.size() != grid.size())
        throw std::invalid_argument("select_level: statistic/grid size mismatch");
    for (std::size_t i = stats.size(); i-- > 0;) {
        if (stats[i] >= threshold) return {grid[i], false};
    }
    return {grid[0], true};
}

std::vector<double> distinct_censoring_times(const Dataset& data) {
    std::set<double> times;
    for (const auto& rec : data.records())
        if (!rec.event) times.insert(rec.time);
    return {times.begin(), times.end()};
}

std::vector<double> censoring_martingale_increments(const ObservedRecord& rec,
                                                    const StepSurvivalCurve& censor_curve,
                                                    std::span<const double> censor_times,
                                                    double positivity_floor) {
    std::vector<double> increments(censor_times.size());
    double prev = 0.0;  // M(0) = 0
    for (std::size_t k = 0; k < censor_times.size(); ++k) {
        const double u = censor_times[k];
        const double counting = (!rec.event && rec.time <= u) ? 1.0 : 0.0;
        const double s = clamp_floor(censor_curve.value_at(std::min(rec.time, u)),
                                     positivity_floor);
        const double m = counting + std::log(s);
        increments[k] = m - prev;
        prev = m;
    }
    return increments;
}

double augmentation_term(const Dataset& calib, const ConditionalExceedance& eta,
                         const ConditionalSurvivalModel& censor_model, double beta, double alpha,
                         double positivity_floor) {
    if (calib.empty()) throw std::invalid_argument("augmentation_term: empty calibration set");
    const auto censor_times = distinct_censoring_times(calib);
    double total = 0.0;
    for (const auto& rec : calib.records()) {
        const auto curve = censor_model.predict_curve(rec.covariates);
        const auto dm = censoring_martingale_increments(rec, curve, censor_times,
                                                        positivity_floor);
        for (std::size_t k = 0; k < censor_times.size(); ++k) {
            const double u = censor_times[k];
            const double sc = clamp_floor(curve.value_at(u), positivity_floor);
            total += (eta.exceedance(beta, u, rec.covariates) - (1.0 - alpha)) / sc * dm[k];
        }
    }
    return total / static_cast<double>(calib.size());
}

namespace {

// Per-subject ingredients shared by the grid passes.
struct SubjectState {
    double weight = 0.0;      // Delta / clamp(S_C(Y | X)), zero when censored
    bool event = false;
    double score = 0.0;       // R(X_i, Y_i)
};

// Grid pass of the augmentation term for the pseudo-quantile exceedance.
// For subject i with event-curve quantile q = q(beta | x_i):
//   sum_k (eta - (1-a)) A_k  =  a * (A_tot - A_<q) + S(q) B_<q - (1-a) A_<q
// with A_k = dM_k / clamp(S_C(u_k)), B_k = A_k / clamp(S_T(u_k)), and the
// prefix sums taken over censoring times u_k < q. Exact regrouping of the
// finite sum, evaluated in O(Q + grid) per subject.
void accumulate_quantile_augmentation(const ObservedRecord& rec,
                                      const StepSurvivalCurve& censor_curve,
                                      const StepSurvivalCurve& event_curve,
                                      std::span<const double> censor_times,
                                      const BetaGrid& grid, double alpha, double floor,
                                      std::vector<double>& pi_accum) {
    const std::size_t q_count = censor_times.size();
    const auto dm = censoring_martingale_increments(rec, censor_curve, censor_times, floor);

    std::vector<double> prefix_a(q_count + 1, 0.0);
    std::vector<double> prefix_b(q_count + 1, 0.0);
    for (std::size_t k = 0; k < q_count; ++k) {
        const double a_k = dm[k] / clamp_floor(censor_curve.value_at(censor_times[k]), floor);
        const double b_k = a_k / clamp_floor(event_curve.value_at(censor_times[k]), floor);
        prefix_a[k + 1] = prefix_a[k] + a_k;
        prefix_b[k + 1] = prefix_b[k] + b_k;
    }
    const double a_total = prefix_a[q_count];

    const auto& betas = grid.values();
    const auto quantiles = event_curve.quantiles(betas);
    std::size_t below = 0;  // #{k : u_k < q}, monotone since q ascends with beta
    for (std::size_t g = 0; g < betas.size(); ++g) {
        const double q = quantiles[g];
        while (below < q_count && censor_times[below] < q) ++below;
        const double surv_at_q =
            q == kInfiniteTime ? event_curve.tail_value() : event_curve.value_at(q);
        pi_accum[g] += alpha * (a_total - prefix_a[below]) + surv_at_q * prefix_b[below] -
                       (1.0 - alpha) * prefix_a[below];
    }
}

}  // namespace

CalibrationResult calibrate(const Dataset& calib, const NonConformityScore& score,
                            const ConditionalSurvivalModel* censor_model,
                            const ConditionalExceedance* eta,
                            const ConditionalSurvivalModel* survival_model,
                            const CalibrationConfig& config, Method method) {
    CalibrationResult result;
    result.method = method;
    result.alpha = config.alpha;

    const auto& betas = config.grid.values();
    const std::size_t g_count = betas.size();

    if (method == Method::OR) {
        result.beta_hat = config.grid.floor_to_grid(config.alpha);
        return result;
    }
    if (calib.empty()) throw std::invalid_argument("calibrate: empty calibration set");
    const double n = static_cast<double>(calib.size());

    if (method == Method::COR) {
        if (survival_model == nullptr)
            throw std::invalid_argument("calibrate: COR requires the event-time survival model");
        std::vector<double> stat(g_count, 0.0);
        for (const auto& rec : calib.records()) {
            const auto curve = survival_model->predict_curve(rec.covariates);
            const auto qs = curve.quantiles(betas);
            for (std::size_t g = 0; g < g_count; ++g) {
                stat[g] += qs[g] == kInfiniteTime ? curve.tail_value() : curve.value_at(qs[g]);
            }
        }
        for (auto& s : stat) s /= n;
        auto sel = select_level(config.grid, stat, 1.0 - config.alpha);
        result.beta_hat = sel.beta;
        result.degenerate = sel.degenerate;
        result.margin = std::move(stat);
        return result;
    }

    if (censor_model == nullptr)
        throw std::invalid_argument("calibrate: " + method_name(method) +
                                    " requires a censoring model");

    // Shared complete-case ingredients.
    std::vector<SubjectState> subjects(calib.size());
    std::vector<StepSurvivalCurve> censor_curves;
    const bool need_curves = method == Method::AIPCW;
    if (need_curves) censor_curves.reserve(calib.size());
    for (std::size_t i = 0; i < calib.size(); ++i) {
        const auto& rec = calib[i];
        auto curve = censor_model->predict_curve(rec.covariates);
        subjects[i].event = rec.event;
        subjects[i].score = score.score(rec.covariates, rec.time);
        subjects[i].weight =
            rec.event ? 1.0 / clamp_floor(curve.value_at(rec.time), config.positivity_floor)
                      : 0.0;
        if (need_curves) censor_curves.push_back(std::move(curve));
    }

    if (method == Method::HT_IPCW) {
        std::vector<double> coverage(g_count, 0.0);
        for (std::size_t g = 0; g < g_count; ++g) {
            double sum = 0.0;
            for (const auto& s : subjects)
                if (s.event && s.score >= betas[g]) sum += s.weight;
            coverage[g] = sum / n;
        }
        auto sel = select_level(config.grid, coverage, 1.0 - config.alpha);
        result.beta_hat = sel.beta;
        result.degenerate = sel.degenerate;
        result.margin = std::move(coverage);
        return result;
    }

    std::vector<double> w(g_count, 0.0);
    for (std::size_t g = 0; g < g_count; ++g) {
        double above = 0.0;
        double below = 0.0;
        for (const auto& s : subjects) {
            if (!s.event) continue;
            if (s.score >= betas[g])
                above += s.weight;
            else
                below += s.weight;
        }
        w[g] = (config.alpha * above - (1.0 - config.alpha) * below) / n;
    }

    if (method == Method::IPCW) {
        auto sel = select_level(config.grid, w);
        result.beta_hat = sel.beta;
        result.degenerate = sel.degenerate;
        result.margin = std::move(w);
        return result;
    }

    // AIPCW
    if (eta == nullptr)
        throw std::invalid_argument("calibrate: AIPCW requires an exceedance estimator");
    const auto censor_times = distinct_censoring_times(calib);
    std::vector<double> pi(g_count, 0.0);
    if (const auto* qeta = dynamic_cast<const QuantileScoreExceedance*>(eta)) {
        for (std::size_t i = 0; i < calib.size(); ++i) {
            const auto event_curve = qeta->model().predict_curve(calib[i].covariates);
            accumulate_quantile_augmentation(calib[i], censor_curves[i], event_curve,
                                             censor_times, config.grid, config.alpha,
                                             config.positivity_floor, pi);
        }
        for (auto& p : pi) p /= n;
    } else {
        for (std::size_t g = 0; g < g_count; ++g)
            pi[g] = augmentation_term(calib, *eta, *censor_model, betas[g], config.alpha,
                                      config.positivity_floor);
    }

    std::vector<double> total(g_count);
    for (std::size_t g = 0; g < g_count; ++g) total[g] = w[g] + pi[g];
    auto sel = select_level(config.grid, total);
    result.beta_hat = sel.beta;
    result.degenerate = sel.degenerate;
    result.margin = std::move(w);
    result.augmentation = std::move(pi);
    return result;
}

double influence_function(const ObservedRecord& rec, const StepSurvivalCurve& censor_curve,
                          const ConditionalExceedance& eta, std::span<const double> censor_times,
                          double score_value, double beta, double alpha,
                          double positivity_floor) {
    double value = 0.0;
    if (rec.event) {
        const double sc = clamp_floor(censor_curve.value_at(rec.time), positivity_floor);
        const double ind = score_value >= beta ? 1.0 : 0.0;
        value += (ind - (1.0 - alpha)) / sc;
    }
    const auto dm = censoring_martingale_increments(rec, censor_curve, censor_times,
                                                    positivity_floor);
    for (std::size_t k = 0; k < censor_times.size(); ++k) {
        const double sc = clamp_floor(censor_curve.value_at(censor_times[k]), positivity_floor);
        value += (eta.exceedance(beta, censor_times[k], rec.covariates) - (1.0 - alpha)) / sc *
                 dm[k];
    }
    return value;
}

double influence_function_lemma_form(const ObservedRecord& rec,
                                     const StepSurvivalCurve& censor_curve,
                                     const ConditionalExceedance& eta,
                                     std::span<const double> censor_times, double score_value,
                                     double beta, double alpha, double positivity_floor) {
    const double ind = score_value >= beta ? 1.0 : 0.0;
    double value = ind - (1.0 - alpha);
    const auto dm = censoring_martingale_increments(rec, censor_curve, censor_times,
                                                    positivity_floor);
    for (std::size_t k = 0; k < censor_times.size(); ++k) {
        const double sc = clamp_floor(censor_curve.value_at(censor_times[k]), positivity_floor);
        value -= (ind - eta.exceedance(beta, censor_times[k], rec.covariates)) / sc * dm[k];
    }
    return value;
}

LPBModel::LPBModel(std::shared_ptr<const ConditionalSurvivalModel> quantile_model,
                   double beta_hat)
    : quantile_model_(std::move(quantile_model)), beta_hat_(beta_hat) {
    if (!quantile_model_) throw std::invalid_argument("LPBModel: null quantile model");
}

LPBModel::LPBModel(std::shared_ptr<const NonConformityScore> score, double beta_hat,
                   double horizon)
    : score_(std::move(score)), beta_hat_(beta_hat), horizon_(horizon) {
    if (!score_) throw std::invalid_argument("LPBModel: null score");
    if (!(horizon_ > 0.0)) throw std::invalid_argument("LPBModel: horizon must be positive");
}

double LPBModel::lower_bound(std::span<const double> x) const {
    if (quantile_model_) return quantile_model_->predict_curve(x).quantile(beta_hat_);
    if (beta_hat_ <= 0.0) return 0.0;
    // Bisection for inf{t : R(x,t) >= beta_hat}; R is nondecreasing in t.
    if (score_->score(x, horizon_) < beta_hat_) return kInfiniteTime;
    double lo = 0.0, hi = horizon_;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (score_->score(x, mid) >= beta_hat_)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace survlpb
