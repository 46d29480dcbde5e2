#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace survlpb {

// Ascending calibration levels in [0,1], always containing 0 and 1.
// Default is the 1001-point grid {j/1000}.
class BetaGrid {
public:
    BetaGrid() : BetaGrid(1000) {}

    explicit BetaGrid(std::size_t steps) {
        if (steps == 0) throw std::invalid_argument("BetaGrid: need at least one step");
        values_.reserve(steps + 1);
        for (std::size_t j = 0; j <= steps; ++j)
            values_.push_back(static_cast<double>(j) / static_cast<double>(steps));
    }

    explicit BetaGrid(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 2 || values_.front() != 0.0 || values_.back() != 1.0)
            throw std::invalid_argument("BetaGrid: values must start at 0 and end at 1");
        for (std::size_t i = 1; i < values_.size(); ++i)
            if (!(values_[i] > values_[i - 1]))
                throw std::invalid_argument("BetaGrid: values must be strictly increasing");
    }

    static BetaGrid from_step(double step) {
        if (!(step > 0.0) || !(step <= 1.0))
            throw std::invalid_argument("BetaGrid: step must lie in (0,1]");
        const double raw = 1.0 / step;
        const double rounded = std::round(raw);
        if (std::abs(raw - rounded) > 1e-9)
            throw std::invalid_argument("BetaGrid: step must divide 1 into whole steps");
        return BetaGrid(static_cast<std::size_t>(rounded));
    }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    // Largest grid value <= x (x >= 0 assumed).
    double floor_to_grid(double x) const {
        auto it = std::upper_bound(values_.begin(), values_.end(), x);
        if (it == values_.begin()) return values_.front();
        return *(it - 1);
    }

private:
    std::vector<double> values_;
};

}  // namespace survlpb
