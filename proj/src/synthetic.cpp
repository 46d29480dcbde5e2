#include "survlpb/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "survlpb/random.hpp"

namespace survlpb {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double event_rate_setting1(std::span<const double> x) { return std::exp(-x[0] + x[1]); }

bool in_region_a2(std::span<const double> x) { return x[1] < 0.0 && x[2] > 0.0 && x[3] > 0.0; }

bool in_region_at3(std::span<const double> x) {
    for (int j = 0; j < 5; ++j)
        if (!(x[static_cast<std::size_t>(j)] > 0.0)) return false;
    for (int j = 5; j < 10; ++j)
        if (!(x[static_cast<std::size_t>(j)] < 0.0)) return false;
    return true;
}

double event_logmean(const SettingSpec& setting, std::span<const double> x) {
    const bool inside = setting.id == 2 ? in_region_a2(x) : in_region_at3(x);
    return inside ? std::log(10.0) : std::log(1000.0);
}

double censor_logmean(const SettingSpec& setting, std::span<const double> x) {
    const bool small = setting.id == 2 ? x[0] < 0.0 : (x[0] > 0.0 && x[1] < 0.0);
    return small ? std::log(10.0) : std::log(1000.0);
}

}  // namespace

SettingSpec setting_spec(int id) {
    switch (id) {
        case 1: return {1, 2};
        case 2: return {2, 100};
        case 3: return {3, 100};
        default: throw std::invalid_argument("setting_spec: unknown setting id");
    }
}

std::vector<FullRecord> generate(const SettingSpec& setting, std::size_t n, uint64_t seed) {
    if (setting.id < 1 || setting.id > 3)
        throw std::invalid_argument("generate: unknown setting id");
    if (n == 0) throw std::invalid_argument("generate: n must be positive");

    rng::Engine eng(seed);
    std::vector<FullRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        FullRecord rec;
        rec.covariates.resize(setting.dim);
        if (setting.id == 1) {
            for (auto& c : rec.covariates) c = eng.normal();
            rec.event_time = eng.exponential(event_rate_setting1(rec.covariates));
            rec.censor_time = eng.exponential(1.0 / 3.0);
        } else {
            for (auto& c : rec.covariates) c = 2.0 * eng.uniform() - 1.0;
            rec.event_time = eng.lognormal(event_logmean(setting, rec.covariates), 1.0);
            rec.censor_time = eng.lognormal(censor_logmean(setting, rec.covariates), 1.0);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

double oracle_quantile(const SettingSpec& setting, double beta, std::span<const double> x) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::invalid_argument("oracle_quantile: beta must lie in (0,1)");
    if (setting.id == 1) return -std::log1p(-beta) / event_rate_setting1(x);
    return std::exp(event_logmean(setting, x) + rng::inverse_normal_cdf(beta));
}

double oracle_event_survival(const SettingSpec& setting, double t, std::span<const double> x) {
    if (t <= 0.0) return 1.0;
    if (setting.id == 1) return std::exp(-event_rate_setting1(x) * t);
    return 1.0 - normal_cdf(std::log(t) - event_logmean(setting, x));
}

double oracle_censor_survival(const SettingSpec& setting, double t, std::span<const double> x) {
    if (t <= 0.0) return 1.0;
    if (setting.id == 1) return std::exp(-t / 3.0);
    return 1.0 - normal_cdf(std::log(t) - censor_logmean(setting, x));
}

}  // namespace survlpb
