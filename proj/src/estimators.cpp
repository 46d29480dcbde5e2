#include "survlpb/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace survlpb {

namespace {

bool relevant_event(const ObservedRecord& rec, TargetKind target) {
    return target == TargetKind::EventTime ? rec.event : !rec.event;
}

// Product-limit curve over the distinct relevant-event times of `idx`.
StepSurvivalCurve product_limit(const Dataset& data, std::span<const std::size_t> idx,
                                TargetKind target) {
    std::vector<std::size_t> order(idx.begin(), idx.end());
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data[a].time < data[b].time;
    });

    std::vector<double> knots;
    std::vector<double> values;
    double surv = 1.0;
    std::size_t at_risk = order.size();
    std::size_t i = 0;
    while (i < order.size()) {
        const double t = data[order[i]].time;
        std::size_t deaths = 0;
        std::size_t leaving = 0;
        while (i < order.size() && data[order[i]].time == t) {
            if (relevant_event(data[order[i]], target)) ++deaths;
            ++leaving;
            ++i;
        }
        if (deaths > 0) {
            surv *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
            knots.push_back(t);
            values.push_back(std::max(0.0, surv));
        }
        at_risk -= leaving;
    }
    return StepSurvivalCurve(std::move(knots), std::move(values));
}

}  // namespace

std::shared_ptr<KaplanMeierModel> km_fit(const Dataset& data, TargetKind target) {
    if (data.empty()) throw std::invalid_argument("km_fit: empty dataset");
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return std::make_shared<KaplanMeierModel>(product_limit(data, all, target));
}

// ---------------------------------------------------------------------------
// Cox proportional hazards
// ---------------------------------------------------------------------------

CoxModel::CoxModel(std::vector<double> coefficients, std::vector<double> covariate_means,
                   CumulativeHazard baseline)
    : coefficients_(std::move(coefficients)),
      means_(std::move(covariate_means)),
      baseline_(std::move(baseline)) {
    if (coefficients_.size() != means_.size())
        throw std::invalid_argument("CoxModel: coefficient/means size mismatch");
}

double CoxModel::linear_predictor(std::span<const double> x) const {
    if (x.size() != coefficients_.size())
        throw std::invalid_argument("CoxModel: covariate dimension mismatch");
    double lp = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lp += (x[j] - means_[j]) * coefficients_[j];
    return lp;
}

StepSurvivalCurve CoxModel::predict_curve(std::span<const double> x) const {
    const double risk = std::exp(linear_predictor(x));
    std::vector<double> values(baseline_.size());
    for (std::size_t i = 0; i < baseline_.size(); ++i)
        values[i] = std::exp(-baseline_.cumulative()[i] * risk);
    return StepSurvivalCurve(baseline_.knots(), std::move(values));
}

double CoxModel::survival_at(std::span<const double> x, double t) const {
    return std::exp(-baseline_.value_at(t) * std::exp(linear_predictor(x)));
}

namespace {

struct CoxWork {
    Eigen::MatrixXd x;        // centered covariates, one row per record
    std::vector<double> time;
    std::vector<char> event;  // relevant indicator
    std::vector<std::size_t> order;  // descending time
};

// Log partial likelihood with Breslow tie handling, gradient and Hessian.
// Risk-set sums accumulate over records sorted by descending time; linear
// predictors are shifted by their max before exponentiation.
double cox_loglik(const CoxWork& w, const Eigen::VectorXd& beta, Eigen::VectorXd* grad,
                  Eigen::MatrixXd* hess, double* lp_shift_out = nullptr) {
    const auto n = static_cast<std::size_t>(w.x.rows());
    const auto d = static_cast<std::size_t>(w.x.cols());
    Eigen::VectorXd lp = w.x * beta;
    const double shift = lp.maxCoeff();
    if (lp_shift_out) *lp_shift_out = shift;

    double loglik = 0.0;
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                                               static_cast<Eigen::Index>(d));
    if (grad) grad->setZero(static_cast<Eigen::Index>(d));
    if (hess) hess->setZero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

    std::size_t i = 0;
    while (i < n) {
        const double t = w.time[w.order[i]];
        // Extend the risk set with everyone at this time.
        std::size_t j = i;
        while (j < n && w.time[w.order[j]] == t) {
            const std::size_t r = w.order[j];
            const double e = std::exp(lp[static_cast<Eigen::Index>(r)] - shift);
            s0 += e;
            const auto row = w.x.row(static_cast<Eigen::Index>(r));
            s1 += e * row.transpose();
            if (hess) s2.selfadjointView<Eigen::Lower>().rankUpdate(row.transpose(), e);
            ++j;
        }
        // Breslow: all deaths in the tie group share the same risk-set sums.
        std::size_t deaths = 0;
        for (std::size_t q = i; q < j; ++q) {
            const std::size_t r = w.order[q];
            if (w.event[r]) {
                ++deaths;
                loglik += lp[static_cast<Eigen::Index>(r)];
                if (grad) *grad += w.x.row(static_cast<Eigen::Index>(r)).transpose();
            }
        }
        if (deaths > 0) {
            const double dd = static_cast<double>(deaths);
            loglik -= dd * (std::log(s0) + shift);
            if (grad) *grad -= dd * (s1 / s0);
            if (hess) {
                Eigen::MatrixXd s2full = s2.selfadjointView<Eigen::Lower>();
                Eigen::VectorXd mean = s1 / s0;
                *hess -= dd * (s2full / s0 - mean * mean.transpose());
            }
        }
        i = j;
    }
    return loglik;
}

}  // namespace

std::shared_ptr<CoxModel> cox_fit(const Dataset& data, TargetKind target,
                                  const NewtonConfig& config) {
    if (data.empty()) throw std::invalid_argument("cox_fit: empty dataset");
    const std::size_t n = data.size();
    const std::size_t d = data.dim();
    if (d == 0) throw std::invalid_argument("cox_fit: no covariates");

    std::size_t n_events = 0;
    for (const auto& rec : data.records())
        if (relevant_event(rec, target)) ++n_events;
    if (n_events == 0) throw CoxFitError("cox_fit: no relevant events in the data");

    std::vector<double> means(d, 0.0);
    for (const auto& rec : data.records())
        for (std::size_t j = 0; j < d; ++j) means[j] += rec.covariates[j];
    for (auto& m : means) m /= static_cast<double>(n);

    for (std::size_t j = 0; j < d; ++j) {
        bool varies = false;
        for (const auto& rec : data.records())
            if (rec.covariates[j] != data[0].covariates[j]) {
                varies = true;
                break;
            }
        if (!varies)
            throw CoxFitError("cox_fit: covariate column " + std::to_string(j + 1) +
                              " is constant; information matrix is singular");
    }

    CoxWork w;
    w.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    w.time.resize(n);
    w.event.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = data[i];
        for (std::size_t j = 0; j < d; ++j)
            w.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rec.covariates[j] - means[j];
        w.time[i] = rec.time;
        w.event[i] = relevant_event(rec, target) ? 1 : 0;
    }
    w.order.resize(n);
    std::iota(w.order.begin(), w.order.end(), std::size_t{0});
    std::sort(w.order.begin(), w.order.end(),
              [&](std::size_t a, std::size_t b) { return w.time[a] > w.time[b]; });

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::VectorXd grad(static_cast<Eigen::Index>(d));
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

    double loglik = cox_loglik(w, beta, &grad, &hess);
    double grad_norm = grad.norm();
    std::vector<double> trace{loglik};
    int iter = 0;
    while (grad_norm > config.tol && iter < config.max_iter) {
        Eigen::LLT<Eigen::MatrixXd> solver(-hess);
        if (solver.info() != Eigen::Success)
            throw CoxFitError("cox_fit: singular information matrix");
        Eigen::VectorXd step = solver.solve(grad);
        if (!step.allFinite()) throw CoxFitError("cox_fit: singular information matrix");

        // Ascent up to rounding noise in the log likelihood.
        const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                             (std::abs(loglik) + 1.0);
        double scale = 1.0;
        int halvings = 0;
        double new_loglik;
        Eigen::VectorXd candidate;
        for (;;) {
            candidate = beta + scale * step;
            new_loglik = cox_loglik(w, candidate, nullptr, nullptr);
            if (std::isfinite(new_loglik) && new_loglik >= loglik - noise) break;
            scale *= 0.5;
            if (++halvings > config.max_halvings)
                throw CoxFitError("cox_fit: line search failed; final gradient norm " +
                                  std::to_string(grad_norm));
        }
        beta = candidate;
        loglik = cox_loglik(w, beta, &grad, &hess);
        trace.push_back(loglik);
        grad_norm = grad.norm();
        ++iter;
    }
    if (grad_norm > config.tol)
        throw CoxFitError("cox_fit: no convergence after " + std::to_string(iter) +
                          " iterations; final gradient norm " + std::to_string(grad_norm));

    // Breslow baseline: dLambda0(t_k) = d_k / sum_{j at risk} exp(lp_j).
    Eigen::VectorXd lp = w.x * beta;
    const double shift = lp.maxCoeff();
    std::vector<double> knots;
    std::vector<double> increments;
    double s0 = 0.0;
    std::size_t i = 0;
    while (i < n) {
        const double t = w.time[w.order[i]];
        std::size_t deaths = 0;
        std::size_t j = i;
        while (j < n && w.time[w.order[j]] == t) {
            const std::size_t r = w.order[j];
            s0 += std::exp(lp[static_cast<Eigen::Index>(r)] - shift);
            if (w.event[r]) ++deaths;
            ++j;
        }
        if (deaths > 0) {
            knots.push_back(t);
            increments.push_back(static_cast<double>(deaths) / (s0 * std::exp(shift)));
        }
        i = j;
    }
    // Accumulated in descending time; flip to ascending.
    std::reverse(knots.begin(), knots.end());
    std::reverse(increments.begin(), increments.end());

    std::vector<double> coef(d);
    for (std::size_t j = 0; j < d; ++j) coef[j] = beta[static_cast<Eigen::Index>(j)];
    auto model = std::make_shared<CoxModel>(std::move(coef), std::move(means),
                                            CumulativeHazard(std::move(knots), std::move(increments)));
    model->iterations = iter;
    model->final_gradient_norm = grad_norm;
    model->loglik_trace = std::move(trace);
    return model;
}

// ---------------------------------------------------------------------------
// k-nearest-neighbour Kaplan-Meier
// ---------------------------------------------------------------------------

std::size_t knn_default_k(std::size_t n) {
    const auto rule = static_cast<std::size_t>(
        std::ceil(0.2 * static_cast<double>(n)));
    return std::min(n, std::max<std::size_t>(50, rule));
}

KnnKaplanMeierModel::KnnKaplanMeierModel(Dataset training, TargetKind target, std::size_t k)
    : training_(std::move(training)), target_(target), k_(k) {
    if (training_.empty()) throw std::invalid_argument("knn_km_fit: empty dataset");
    if (k_ == 0 || k_ > training_.size())
        throw std::invalid_argument("knn_km_fit: k must lie in [1, n]");
    const std::size_t d = training_.dim();
    means_.assign(d, 0.0);
    inv_sd_.assign(d, 0.0);
    const double n = static_cast<double>(training_.size());
    for (const auto& rec : training_.records())
        for (std::size_t j = 0; j < d; ++j) means_[j] += rec.covariates[j];
    for (auto& m : means_) m /= n;
    std::vector<double> var(d, 0.0);
    for (const auto& rec : training_.records())
        for (std::size_t j = 0; j < d; ++j) {
            const double c = rec.covariates[j] - means_[j];
            var[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / n);
        inv_sd_[j] = sd > 0.0 ? 1.0 / sd : 0.0;  // constant column: no distance contribution
    }
}

StepSurvivalCurve KnnKaplanMeierModel::predict_curve(std::span<const double> x) const {
    const std::size_t d = training_.dim();
    if (x.size() != d) throw std::invalid_argument("knn predict: covariate dimension mismatch");

    std::vector<std::pair<double, std::size_t>> dist(training_.size());
    for (std::size_t i = 0; i < training_.size(); ++i) {
        const auto& c = training_[i].covariates;
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = (x[j] - c[j]) * inv_sd_[j];
            acc += diff * diff;
        }
        dist[i] = {acc, i};
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1),
                     dist.end());
    // Deterministic tie handling at the k-th distance: among equal distances
    // keep the smallest record indices.
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> picked(k_);
    for (std::size_t i = 0; i < k_; ++i) picked[i] = dist[i].second;
    return product_limit(training_, picked, target_);
}

std::shared_ptr<KnnKaplanMeierModel> knn_km_fit(const Dataset& data, TargetKind target,
                                                std::size_t k) {
    return std::make_shared<KnnKaplanMeierModel>(data, target, k);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string CoxModel::to_json() const {
    nlohmann::json j;
    j["type"] = "cox";
    j["coefficients"] = coefficients_;
    j["covariate_means"] = means_;
    j["baseline"]["knots"] = baseline_.knots();
    j["baseline"]["increments"] = baseline_.increments();
    return j.dump();
}

std::shared_ptr<CoxModel> CoxModel::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (j.at("type") != "cox") throw std::runtime_error("CoxModel::from_json: not a cox model");
    return std::make_shared<CoxModel>(
        j.at("coefficients").get<std::vector<double>>(),
        j.at("covariate_means").get<std::vector<double>>(),
        CumulativeHazard(j.at("baseline").at("knots").get<std::vector<double>>(),
                         j.at("baseline").at("increments").get<std::vector<double>>()));
}

std::string model_to_json(const ConditionalSurvivalModel& model) {
    if (const auto* cox = dynamic_cast<const CoxModel*>(&model)) return cox->to_json();
    if (const auto* km = dynamic_cast<const KaplanMeierModel*>(&model)) {
        nlohmann::json j;
        j["type"] = "km";
        j["curve"]["knots"] = km->curve().knots();
        j["curve"]["values"] = km->curve().values();
        return j.dump();
    }
    throw std::runtime_error("model_to_json: model type has no closed-form serialization");
}

std::shared_ptr<ConditionalSurvivalModel> model_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    const std::string type = j.at("type").get<std::string>();
    if (type == "cox") return CoxModel::from_json(text);
    if (type == "km") {
        return std::make_shared<KaplanMeierModel>(
            StepSurvivalCurve(j.at("curve").at("knots").get<std::vector<double>>(),
                              j.at("curve").at("values").get<std::vector<double>>()));
    }
    throw std::runtime_error("model_from_json: unknown model type '" + type + "'");
}

}  // namespace survlpb
