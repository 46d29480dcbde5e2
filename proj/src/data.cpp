#include "survlpb/data.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "survlpb/format.hpp"
#include "survlpb/random.hpp"

namespace survlpb {

namespace {

void validate_record(const ObservedRecord& rec, std::size_t dim) {
    if (rec.covariates.size() != dim)
        throw std::invalid_argument("Dataset: covariate dimension mismatch");
    if (!(rec.time > 0.0) || !std::isfinite(rec.time))
        throw std::invalid_argument("Dataset: time must be positive and finite");
}

}  // namespace

Dataset::Dataset(std::vector<ObservedRecord> records, std::size_t dim)
    : records_(std::move(records)), dim_(dim) {
    for (const auto& rec : records_) validate_record(rec, dim_);
}

void Dataset::add(ObservedRecord rec) {
    if (records_.empty() && dim_ == 0) dim_ = rec.covariates.size();
    validate_record(rec, dim_);
    records_.push_back(std::move(rec));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out(dim_);
    for (std::size_t i : indices) {
        if (i >= records_.size()) throw std::out_of_range("Dataset::subset: index out of range");
        out.add(records_[i]);
    }
    return out;
}

SplitIndices split_dataset(const Dataset& data, double calib_fraction, uint64_t seed) {
    const std::size_t n = data.size();
    if (n < 2) throw std::invalid_argument("split_dataset: need at least 2 records");
    if (!(calib_fraction > 0.0) || !(calib_fraction < 1.0))
        throw std::invalid_argument("split_dataset: calib_fraction must lie in (0,1)");

    const auto n_calib =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * calib_fraction));
    if (n_calib == 0 || n_calib == n)
        throw std::invalid_argument("split_dataset: degenerate split sizes");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng::Engine eng(seed);
    // Fisher-Yates; std::shuffle is not pinned down by the standard.
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(eng.below(i + 1));
        std::swap(idx[i], idx[j]);
    }

    SplitIndices split;
    split.calib.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_calib));
    split.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_calib), idx.end());
    std::sort(split.calib.begin(), split.calib.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t row, const std::string& col) {
    double v = 0.0;
    auto first = s.data();
    auto last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    while (ptr != last && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    if (ec != std::errc{} || ptr != last) {
        throw std::runtime_error("CSV row " + std::to_string(row) + ", column " + col +
                                 ": cannot parse number from '" + s + "'");
    }
    return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_line(line);
    if (header.size() < 3 || header[header.size() - 2] != "time" ||
        header[header.size() - 1] != "event")
        throw std::runtime_error("CSV: header must be x1,...,xd,time,event");
    const std::size_t d = header.size() - 2;
    for (std::size_t j = 0; j < d; ++j) {
        if (header[j] != "x" + std::to_string(j + 1))
            throw std::runtime_error("CSV: covariate column " + std::to_string(j + 1) +
                                     " must be named x" + std::to_string(j + 1));
    }

    Dataset data(d);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != d + 2)
            throw std::runtime_error("CSV row " + std::to_string(row) + ": expected " +
                                     std::to_string(d + 2) + " fields, got " +
                                     std::to_string(fields.size()));
        ObservedRecord rec;
        rec.covariates.resize(d);
        for (std::size_t j = 0; j < d; ++j)
            rec.covariates[j] = parse_double(fields[j], row, "x" + std::to_string(j + 1));
        rec.time = parse_double(fields[d], row, "time");
        double ev = parse_double(fields[d + 1], row, "event");
        if (ev != 0.0 && ev != 1.0)
            throw std::runtime_error("CSV row " + std::to_string(row) +
                                     ": event must be 0 or 1");
        rec.event = ev == 1.0;
        if (!(rec.time > 0.0) || !std::isfinite(rec.time))
            throw std::runtime_error("CSV row " + std::to_string(row) +
                                     ": time must be positive and finite");
        data.add(std::move(rec));
    }
    return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
    out << "time,event\n";
    for (const auto& rec : data.records()) {
        for (double x : rec.covariates) out << format_double(x) << ',';
        out << format_double(rec.time) << ',' << (rec.event ? 1 : 0) << '\n';
    }
}

void write_full_csv(std::ostream& out, const std::vector<FullRecord>& records) {
    const std::size_t d = records.empty() ? 0 : records.front().covariates.size();
    for (std::size_t j = 0; j < d; ++j) out << 'x' << (j + 1) << ',';
    out << "event_time,censor_time,time,event\n";
    for (const auto& rec : records) {
        for (double x : rec.covariates) out << format_double(x) << ',';
        out << format_double(rec.event_time) << ',' << format_double(rec.censor_time) << ','
            << format_double(std::min(rec.event_time, rec.censor_time)) << ','
            << (rec.event_time <= rec.censor_time ? 1 : 0) << '\n';
    }
}

}  // namespace survlpb
