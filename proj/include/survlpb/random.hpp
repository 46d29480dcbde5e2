#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace survlpb::rng {

// splitmix64 single step; used both as a generator and as a seed mixer.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent stream seed for replication `index` of a run seeded
// with `master`. Pure function, so parallel and sequential schedules agree.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    uint64_t s = master;
    uint64_t a = splitmix64(s);
    s = a ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    uint64_t b = splitmix64(s);
    return b;
}

// xoshiro256** by Blackman & Vigna. Self-contained so that draws are
// bit-identical across standard libraries (std:: distributions are not).
class Engine {
public:
    explicit Engine(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    uint64_t next() {
        auto rotl = [](uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0,1): 53-bit mantissa, then shifted away from exact 0.
    double uniform() {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Unbiased integer in [0, n) via rejection on the multiply-shift split.
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Engine::below: n must be positive");
        uint64_t threshold = (-n) % n;
        for (;;) {
            uint64_t r = next();
            unsigned __int128 m = static_cast<unsigned __int128>(r) * n;
            if (static_cast<uint64_t>(m) >= threshold)
                return static_cast<uint64_t>(m >> 64);
        }
    }

    double normal();  // standard normal via inverse CDF
    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
        return -std::log1p(-uniform()) / rate;
    }
    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

private:
    uint64_t state_[4];
};

// Inverse of the standard normal CDF. Acklam's rational approximation
// refined with one Halley step against std::erfc; absolute error is far
// below the 1e-8 contract.
double inverse_normal_cdf(double p);

inline double Engine::normal() { return inverse_normal_cdf(uniform()); }

}  // namespace survlpb::rng
