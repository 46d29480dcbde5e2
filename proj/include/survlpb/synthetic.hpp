#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "survlpb/data.hpp"

namespace survlpb {

// The three synthetic benchmark designs.
//   1: X ~ N(0,1)^2, T|X ~ Exp(rate exp(-x1+x2)), C ~ Exp(rate 1/3)
//   2: X ~ Unif[-1,1]^100, lognormal T with region A = {x2<0, x3>0, x4>0},
//      lognormal C keyed on the sign of x1
//   3: as 2 with A_T = {x1..x5 > 0, x6..x10 < 0} and A_C = {x1>0, x2<0}
// Exp(rate) has mean 1/rate; LogNorm(mu, 1) has log-scale mean mu and
// log-scale standard deviation 1.
struct SettingSpec {
    int id = 1;
    std::size_t dim = 2;
};

SettingSpec setting_spec(int id);

std::vector<FullRecord> generate(const SettingSpec& setting, std::size_t n, uint64_t seed);

// Closed-form beta-quantile of T | X = x.
double oracle_quantile(const SettingSpec& setting, double beta, std::span<const double> x);

// Closed-form conditional survival functions of the generating laws; test
// and evaluation oracles.
double oracle_event_survival(const SettingSpec& setting, double t, std::span<const double> x);
double oracle_censor_survival(const SettingSpec& setting, double t, std::span<const double> x);

}  // namespace survlpb
