#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survlpb/data.hpp"

namespace survlpb {

// Full description of a simulation or evaluation run. Defaults follow the
// benchmark protocol: three splits of 1000, target coverage 0.9, the
// 0.001-step level grid.
struct ExperimentConfig {
    int setting = 1;            // ignored when csv_path is set
    std::string csv_path;       // observed-data CSV; empty for synthetic runs
    std::size_t n_train = 1000;
    std::size_t n_calib = 1000;
    std::size_t n_test = 1000;
    double alpha = 0.1;
    double grid_step = 0.001;
    std::vector<std::string> methods = {"ipcw", "aipcw", "or", "cor"};
    std::vector<std::string> estimators = {"cox"};  // km | cox | knn_km
    std::size_t knn_k = 0;                          // 0 = size-based default
    std::size_t replications = 100;
    uint64_t master_seed = 20240101;
    double positivity_floor = 0.05;
    std::string output;

    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json() const;
    void validate() const;
};

// One results line; schema
// replication,setting,method,estimator,metric,alpha,beta_hat,coverage,
// mean_lpb,median_lpb,n_test,flag
struct ResultRow {
    std::size_t replication = 0;
    std::string setting;
    std::string method;
    std::string estimator;
    std::string metric;
    double alpha = 0.0;
    double beta_hat = 0.0;   // NaN when the method has no calibrated level
    double coverage = 0.0;   // NaN on error / missing
    double mean_lpb = 0.0;
    double median_lpb = 0.0;
    std::size_t n_test = 0;
    std::string flag;        // "ok", "degenerate", or "error:<reason>"
};

// Runs every replication; rows come back in deterministic order regardless
// of thread count (0 = hardware concurrency).
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, unsigned threads = 0);

std::string results_to_csv(const std::vector<ResultRow>& rows);
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv_file(const std::string& path);

// Grouped descriptive statistics over result rows (error rows excluded).
struct SummaryRow {
    std::string setting;
    std::string method;
    std::string estimator;
    std::string metric;
    double alpha = 0.0;
    std::size_t n = 0;
    double mean_coverage = 0.0;
    double sd_coverage = 0.0;
    double min_coverage = 0.0;
    double max_coverage = 0.0;
    double mean_mean_lpb = 0.0;
};

std::vector<SummaryRow> aggregate(const std::vector<ResultRow>& rows);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

// Calibration-only output for a CSV dataset: per-method levels and
// per-subject lower bounds, plus serialized nuisance models when they admit
// a closed form.
std::string calibrate_dataset_json(const ExperimentConfig& config, const Dataset& data,
                                   uint64_t seed);

}  // namespace survlpb
