#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace survlpb {

// One subject under right censoring: follow-up time Y = min(T, C) and the
// event indicator Delta = 1{T <= C}.
struct ObservedRecord {
    std::vector<double> covariates;
    double time = 0.0;
    bool event = false;
};

// Fully observed subject; only synthetic generators and oracle evaluation
// ever see both times.
struct FullRecord {
    std::vector<double> covariates;
    double event_time = 0.0;
    double censor_time = 0.0;

    ObservedRecord observed() const {
        return ObservedRecord{covariates, std::min(event_time, censor_time),
                              event_time <= censor_time};
    }
};

class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::size_t dim) : dim_(dim) {}
    Dataset(std::vector<ObservedRecord> records, std::size_t dim);

    void add(ObservedRecord rec);

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    std::size_t dim() const { return dim_; }
    const ObservedRecord& operator[](std::size_t i) const { return records_[i]; }
    const std::vector<ObservedRecord>& records() const { return records_; }

    Dataset subset(std::span<const std::size_t> indices) const;

private:
    std::vector<ObservedRecord> records_;
    std::size_t dim_ = 0;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> calib;
};

// Uniformly random partition with |calib| = floor(n * calib_fraction),
// deterministic for a given seed.
SplitIndices split_dataset(const Dataset& data, double calib_fraction, uint64_t seed);

// CSV with header x1,...,xd,time,event. Parse errors carry row/field context.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

// Extended full-data CSV: x1..xd,event_time,censor_time,time,event.
void write_full_csv(std::ostream& out, const std::vector<FullRecord>& records);

}  // namespace survlpb
