#include "survlpb/quantile_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace survlpb {

namespace {

double pinball(double residual, double tau) {
    return residual >= 0.0 ? tau * residual : (tau - 1.0) * residual;
}

// Empirical tau-quantile as the ceil(tau*n)-th smallest value.
double empirical_quantile(std::vector<double> v, double tau) {
    const auto n = v.size();
    auto k = static_cast<std::size_t>(std::ceil(tau * static_cast<double>(n)));
    k = std::min(std::max<std::size_t>(k, 1), n);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
    return v[k - 1];
}

// Exact minimizer over delta of sum_i pinball(res_i - z_i * delta, tau).
// The right derivative gains |z_i| at each breakpoint res_i / z_i; the
// minimum sits at the first breakpoint where it turns nonnegative.
double line_search(std::span<const double> res, std::span<const double> z, double tau) {
    std::vector<std::pair<double, double>> breaks;  // (delta, |z|)
    double deriv = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        if (z[i] == 0.0) continue;
        breaks.emplace_back(res[i] / z[i], std::abs(z[i]));
        deriv += z[i] > 0.0 ? -z[i] * tau : -z[i] * (tau - 1.0);
    }
    if (breaks.empty()) return 0.0;
    std::sort(breaks.begin(), breaks.end());
    for (const auto& [delta, weight] : breaks) {
        deriv += weight;
        if (deriv >= 0.0) return delta;
    }
    return breaks.back().first;
}

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;
};

}  // namespace

double pinball_loss(const LinearQuantileModel& model, const std::vector<std::vector<double>>& X,
                    std::span<const double> y) {
    if (X.size() != y.size()) throw std::invalid_argument("pinball_loss: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        total += pinball(y[i] - model.predict(X[i]), model.tau);
    return total / static_cast<double>(y.size());
}

LinearQuantileModel pinball_qr_fit(const std::vector<std::vector<double>>& X,
                                   std::span<const double> y, double tau,
                                   const PinballOptConfig& config) {
    const std::size_t n = y.size();
    if (X.size() != n) throw std::invalid_argument("pinball_qr_fit: size mismatch");
    if (!(tau > 0.0) || !(tau < 1.0))
        throw std::invalid_argument("pinball_qr_fit: tau must lie in (0,1)");
    const std::size_t d = n > 0 ? X.front().size() : 0;
    if (n <= d + 1) throw std::invalid_argument("pinball_qr_fit: need n > d + 1");
    for (const auto& row : X)
        if (row.size() != d) throw std::invalid_argument("pinball_qr_fit: ragged design matrix");

    Standardizer st;
    st.mean.assign(d, 0.0);
    st.scale.assign(d, 1.0);
    for (const auto& row : X)
        for (std::size_t j = 0; j < d; ++j) st.mean[j] += row[j];
    for (auto& m : st.mean) m /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (const auto& row : X)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = row[j] - st.mean[j];
            var[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        st.scale[j] = sd > 0.0 ? sd : 1.0;
    }

    std::vector<std::vector<double>> z(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) z[i][j] = (X[i][j] - st.mean[j]) / st.scale[j];

    // theta = (intercept, coefficients) on the standardized design.
    std::vector<double> theta(d + 1, 0.0);
    theta[0] = empirical_quantile(std::vector<double>(y.begin(), y.end()), tau);

    std::vector<double> residual(n);
    auto compute_residuals = [&](const std::vector<double>& th) {
        for (std::size_t i = 0; i < n; ++i) {
            double pred = th[0];
            for (std::size_t j = 0; j < d; ++j) pred += th[j + 1] * z[i][j];
            residual[i] = y[i] - pred;
        }
    };
    auto objective = [&](const std::vector<double>& th) {
        compute_residuals(th);
        double total = 0.0;
        for (double r : residual) total += pinball(r, tau);
        return total / static_cast<double>(n);
    };

    double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double y_var = 0.0;
    for (double v : y) y_var += (v - y_mean) * (v - y_mean);
    const double step_scale = std::max(std::sqrt(y_var / static_cast<double>(n)), 1e-8);

    std::vector<double> best = theta;
    double best_obj = objective(theta);
    std::vector<double> grad(d + 1);
    for (int t = 0; t < config.iterations; ++t) {
        compute_residuals(theta);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double psi = tau - (residual[i] < 0.0 ? 1.0 : 0.0);
            grad[0] -= psi;
            for (std::size_t j = 0; j < d; ++j) grad[j + 1] -= psi * z[i][j];
        }
        const double step =
            step_scale / std::sqrt(static_cast<double>(t + 1)) / static_cast<double>(n);
        for (std::size_t j = 0; j <= d; ++j) theta[j] -= step * grad[j];
        const double obj = objective(theta);
        if (obj < best_obj) {
            best_obj = obj;
            best = theta;
        }
    }
    theta = best;

    // Coordinate-wise exact line searches; each accepted move lowers the
    // objective, and interpolable data reaches its zero-loss fit here.
    compute_residuals(theta);
    std::vector<double> column(n);
    for (int sweep = 0; sweep < config.polish_sweeps; ++sweep) {
        bool improved = false;
        for (std::size_t j = 0; j <= d; ++j) {
            for (std::size_t i = 0; i < n; ++i) column[i] = j == 0 ? 1.0 : z[i][j - 1];
            const double delta = line_search(residual, column, tau);
            if (delta == 0.0) continue;
            double before = 0.0, after = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                before += pinball(residual[i], tau);
                after += pinball(residual[i] - column[i] * delta, tau);
            }
            if (after < before - 1e-15 * std::max(1.0, before)) {
                theta[j] += delta;
                for (std::size_t i = 0; i < n; ++i) residual[i] -= column[i] * delta;
                improved = true;
            }
        }
        if (!improved) break;
    }

    LinearQuantileModel model;
    model.tau = tau;
    model.coefficients.resize(d);
    model.intercept = theta[0];
    for (std::size_t j = 0; j < d; ++j) {
        model.coefficients[j] = theta[j + 1] / st.scale[j];
        model.intercept -= model.coefficients[j] * st.mean[j];
    }
    return model;
}

std::string baseline_name(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::QR_Y: return "qr_y";
        case BaselineMethod::CQR_Y: return "cqr_y";
        case BaselineMethod::QR_T: return "qr_t";
        case BaselineMethod::CQR_T: return "cqr_t";
    }
    throw std::logic_error("baseline_name: unknown method");
}

bool is_baseline_name(const std::string& name) {
    return name == "qr_y" || name == "cqr_y" || name == "qr_t" || name == "cqr_t";
}

BaselineMethod baseline_from_name(const std::string& name) {
    if (name == "qr_y") return BaselineMethod::QR_Y;
    if (name == "cqr_y") return BaselineMethod::CQR_Y;
    if (name == "qr_t") return BaselineMethod::QR_T;
    if (name == "cqr_t") return BaselineMethod::CQR_T;
    throw std::invalid_argument("unknown baseline method '" + name + "'");
}

namespace {

void collect(const Dataset& data, std::span<const std::size_t> idx, bool complete_cases_only,
             std::vector<std::vector<double>>& X, std::vector<double>& y) {
    for (std::size_t i : idx) {
        const auto& rec = data[i];
        if (complete_cases_only && !rec.event) continue;
        X.push_back(rec.covariates);
        y.push_back(rec.time);
    }
}

}  // namespace

BaselineLPB make_baseline_lpb(const Dataset& data, BaselineMethod method, double alpha,
                              const SplitIndices& split, const PinballOptConfig& config) {
    const bool complete_only = method == BaselineMethod::QR_T || method == BaselineMethod::CQR_T;
    const bool conformal = method == BaselineMethod::CQR_Y || method == BaselineMethod::CQR_T;

    std::vector<std::vector<double>> X;
    std::vector<double> y;
    if (conformal) {
        collect(data, split.train, complete_only, X, y);
    } else {
        collect(data, split.train, complete_only, X, y);
        collect(data, split.calib, complete_only, X, y);
    }
    if (y.empty())
        throw std::invalid_argument("make_baseline_lpb: no usable records (all censored?)");

    BaselineLPB lpb;
    lpb.model = pinball_qr_fit(X, y, alpha, config);

    if (conformal) {
        std::vector<double> scores;
        for (std::size_t i : split.calib) {
            const auto& rec = data[i];
            if (complete_only && !rec.event) continue;
            scores.push_back(lpb.model.predict(rec.covariates) - rec.time);
        }
        if (scores.empty())
            throw std::invalid_argument("make_baseline_lpb: empty conformal calibration set");
        const std::size_t m = scores.size();
        const auto rank = static_cast<std::size_t>(
            std::ceil((1.0 - alpha) * static_cast<double>(m + 1)));
        if (rank > m) {
            lpb.correction = std::numeric_limits<double>::infinity();
        } else {
            std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                             scores.end());
            lpb.correction = scores[rank - 1];
        }
    }
    return lpb;
}

}  // namespace survlpb
