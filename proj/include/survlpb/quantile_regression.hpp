#pragma once

#include <span>
#include <string>
#include <vector>

#include "survlpb/data.hpp"

namespace survlpb {

struct LinearQuantileModel {
    double tau = 0.5;
    double intercept = 0.0;
    std::vector<double> coefficients;

    double predict(std::span<const double> x) const {
        double v = intercept;
        for (std::size_t j = 0; j < coefficients.size(); ++j) v += coefficients[j] * x[j];
        return v;
    }
};

struct PinballOptConfig {
    int iterations = 5000;   // subgradient budget
    int polish_sweeps = 50;  // exact coordinate-wise line searches afterwards
};

// Mean pinball loss of a fitted model on (X, y).
double pinball_loss(const LinearQuantileModel& model, const std::vector<std::vector<double>>& X,
                    std::span<const double> y);

// Minimizes the mean pinball loss by subgradient descent with a decaying
// step and best-iterate tracking, started at the empirical tau-quantile
// intercept, then polished by exact coordinate-wise line searches. The
// returned objective never exceeds the starting one.
LinearQuantileModel pinball_qr_fit(const std::vector<std::vector<double>>& X,
                                   std::span<const double> y, double tau,
                                   const PinballOptConfig& config = {});

enum class BaselineMethod { QR_Y, CQR_Y, QR_T, CQR_T };

std::string baseline_name(BaselineMethod m);
bool is_baseline_name(const std::string& name);
BaselineMethod baseline_from_name(const std::string& name);

// A baseline lower bound: linear quantile prediction minus a conformal
// correction (zero for the plain QR variants, possibly +inf when the
// calibration sample is too small for the requested rank).
struct BaselineLPB {
    LinearQuantileModel model;
    double correction = 0.0;

    double lower_bound(std::span<const double> x) const { return model.predict(x) - correction; }
};

// QR-Y / QR-T fit tau = alpha on the pooled train+calib records (complete
// cases only for the *_T variants). The CQR variants fit on the train split
// and shift by the ceil((1-alpha)(m+1))-th smallest one-sided score
// q(X_i) - y_i from the calibration split.
BaselineLPB make_baseline_lpb(const Dataset& data, BaselineMethod method, double alpha,
                              const SplitIndices& split, const PinballOptConfig& config = {});

}  // namespace survlpb
