#include "survlpb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "survlpb/calibrate.hpp"
#include "survlpb/estimators.hpp"
#include "survlpb/format.hpp"
#include "survlpb/metrics.hpp"
#include "survlpb/quantile_regression.hpp"
#include "survlpb/random.hpp"
#include "survlpb/synthetic.hpp"

namespace survlpb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_calibration_method(const std::string& name) {
    return name == "ht_ipcw" || name == "ipcw" || name == "aipcw" || name == "or" ||
           name == "cor";
}

std::shared_ptr<ConditionalSurvivalModel> fit_estimator(const std::string& name,
                                                        const Dataset& train, TargetKind target,
                                                        std::size_t knn_k) {
    if (name == "km") return km_fit(train, target);
    if (name == "cox") return cox_fit(train, target);
    if (name == "knn_km") {
        const std::size_t k = knn_k > 0 ? std::min(knn_k, train.size())
                                        : knn_default_k(train.size());
        return knn_km_fit(train, target, k);
    }
    throw std::invalid_argument("unknown estimator '" + name + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("setting")) cfg.setting = j.at("setting").get<int>();
    if (j.contains("csv_path")) cfg.csv_path = j.at("csv_path").get<std::string>();
    if (j.contains("n_train")) cfg.n_train = j.at("n_train").get<std::size_t>();
    if (j.contains("n_calib")) cfg.n_calib = j.at("n_calib").get<std::size_t>();
    if (j.contains("n_test")) cfg.n_test = j.at("n_test").get<std::size_t>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("grid_step")) cfg.grid_step = j.at("grid_step").get<double>();
    if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("estimators"))
        cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
    if (j.contains("knn_k")) cfg.knn_k = j.at("knn_k").get<std::size_t>();
    if (j.contains("replications")) cfg.replications = j.at("replications").get<std::size_t>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<uint64_t>();
    if (j.contains("positivity_floor"))
        cfg.positivity_floor = j.at("positivity_floor").get<double>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["setting"] = setting;
    if (!csv_path.empty()) j["csv_path"] = csv_path;
    j["n_train"] = n_train;
    j["n_calib"] = n_calib;
    j["n_test"] = n_test;
    j["alpha"] = alpha;
    j["grid_step"] = grid_step;
    j["methods"] = methods;
    j["estimators"] = estimators;
    if (knn_k > 0) j["knn_k"] = knn_k;
    j["replications"] = replications;
    j["master_seed"] = master_seed;
    j["positivity_floor"] = positivity_floor;
    if (!output.empty()) j["output"] = output;
    return j.dump(2);
}

void ExperimentConfig::validate() const {
    if (csv_path.empty() && (setting < 1 || setting > 3))
        throw std::invalid_argument("config: setting must be 1, 2, or 3");
    if (n_train == 0 || n_calib == 0 || n_test == 0)
        throw std::invalid_argument("config: split sizes must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("config: alpha must lie in (0,1)");
    if (!(positivity_floor > 0.0) || !(positivity_floor < 1.0))
        throw std::invalid_argument("config: positivity_floor must lie in (0,1)");
    if (methods.empty()) throw std::invalid_argument("config: methods must be nonempty");
    for (const auto& m : methods)
        if (!is_calibration_method(m) && !is_baseline_name(m))
            throw std::invalid_argument("config: unknown method '" + m + "'");
    if (estimators.empty()) throw std::invalid_argument("config: estimators must be nonempty");
    BetaGrid::from_step(grid_step);  // validates divisibility
}

namespace {

struct ReplicationInput {
    Dataset train;
    Dataset calib;
    Dataset test_observed;
    std::vector<FullRecord> test_full;  // empty for CSV data
};

ReplicationInput make_replication_input(const ExperimentConfig& cfg, const Dataset* csv_data,
                                        uint64_t seed) {
    ReplicationInput input;
    if (csv_data == nullptr) {
        const auto spec = setting_spec(cfg.setting);
        const std::size_t total = cfg.n_train + cfg.n_calib + cfg.n_test;
        auto full = generate(spec, total, seed);
        input.train = Dataset(spec.dim);
        input.calib = Dataset(spec.dim);
        input.test_observed = Dataset(spec.dim);
        for (std::size_t i = 0; i < cfg.n_train; ++i) input.train.add(full[i].observed());
        for (std::size_t i = cfg.n_train; i < cfg.n_train + cfg.n_calib; ++i)
            input.calib.add(full[i].observed());
        for (std::size_t i = cfg.n_train + cfg.n_calib; i < total; ++i) {
            input.test_observed.add(full[i].observed());
            input.test_full.push_back(std::move(full[i]));
        }
        return input;
    }

    // Random three-way split of the provided data, proportional to the
    // configured sizes.
    const std::size_t n = csv_data->size();
    const double total = static_cast<double>(cfg.n_train + cfg.n_calib + cfg.n_test);
    auto n_train = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * static_cast<double>(cfg.n_train) / total));
    auto n_calib = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * static_cast<double>(cfg.n_calib) / total));
    n_train = std::max<std::size_t>(n_train, 2);
    n_calib = std::max<std::size_t>(n_calib, 1);
    if (n_train + n_calib >= n)
        throw std::invalid_argument("dataset too small for the configured split proportions");

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng::Engine eng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(eng.below(i + 1));
        std::swap(idx[i], idx[j]);
    }
    input.train = csv_data->subset({idx.data(), n_train});
    input.calib = csv_data->subset({idx.data() + n_train, n_calib});
    input.test_observed = csv_data->subset({idx.data() + n_train + n_calib,
                                            n - n_train - n_calib});
    return input;
}

ResultRow base_row(const ExperimentConfig& cfg, std::size_t rep) {
    ResultRow row;
    row.replication = rep;
    row.setting = cfg.csv_path.empty() ? std::to_string(cfg.setting) : "csv";
    row.alpha = cfg.alpha;
    row.beta_hat = kNaN;
    row.coverage = kNaN;
    row.mean_lpb = kNaN;
    row.median_lpb = kNaN;
    return row;
}

// One evaluated coverage figure folded into a results line.
void fill_from_report(ResultRow& row, const CoverageReport& report) {
    row.method = report.method;
    row.estimator = report.estimator;
    row.metric = report.metric;
    row.coverage = report.coverage;
    row.n_test = report.n_test;
    row.mean_lpb = report.mean_lpb;
    row.median_lpb = report.median_lpb;
}

CoverageReport make_report(std::string method, std::string estimator, std::string metric,
                           double coverage, const std::vector<double>& bounds,
                           std::size_t n_test, std::size_t* sentinels) {
    const auto summary = lpb_summary(bounds);
    CoverageReport report;
    report.method = std::move(method);
    report.estimator = std::move(estimator);
    report.metric = std::move(metric);
    report.coverage = coverage;
    report.n_test = n_test;
    report.mean_lpb = summary.mean;
    report.median_lpb = summary.median;
    if (sentinels) *sentinels = summary.sentinel_count;
    return report;
}

std::vector<ResultRow> run_replication(const ExperimentConfig& cfg, const Dataset* csv_data,
                                       std::size_t rep) {
    std::vector<ResultRow> rows;
    const uint64_t seed = rng::derive_seed(cfg.master_seed, rep);
    const bool synthetic = csv_data == nullptr;

    ReplicationInput input;
    try {
        input = make_replication_input(cfg, csv_data, seed);
    } catch (const std::exception& ex) {
        for (const auto& est : cfg.estimators)
            for (const auto& m : cfg.methods) {
                auto row = base_row(cfg, rep);
                row.method = m;
                row.estimator = is_baseline_name(m) ? "linear" : est;
                row.metric = synthetic ? "oracle" : "ipcw";
                row.flag = std::string("error:") + ex.what();
                rows.push_back(std::move(row));
            }
        return rows;
    }

    CalibrationConfig calib_cfg;
    calib_cfg.alpha = cfg.alpha;
    calib_cfg.grid = BetaGrid::from_step(cfg.grid_step);
    calib_cfg.positivity_floor = cfg.positivity_floor;

    for (const auto& est : cfg.estimators) {
        std::shared_ptr<ConditionalSurvivalModel> event_model;
        std::shared_ptr<ConditionalSurvivalModel> censor_model;
        std::string fit_error;
        try {
            event_model = fit_estimator(est, input.train, TargetKind::EventTime, cfg.knn_k);
            censor_model = fit_estimator(est, input.train, TargetKind::CensoringTime, cfg.knn_k);
        } catch (const std::exception& ex) {
            fit_error = ex.what();
        }

        for (const auto& m : cfg.methods) {
            if (is_baseline_name(m)) continue;  // estimator-independent, handled below
            auto row = base_row(cfg, rep);
            row.method = m;
            row.estimator = est;
            row.metric = synthetic ? "oracle" : (m == "aipcw" ? "aipcw" : "ipcw");
            row.n_test = synthetic ? input.test_full.size() : input.test_observed.size();
            if (!fit_error.empty()) {
                row.flag = "error:" + fit_error;
                rows.push_back(std::move(row));
                continue;
            }
            try {
                QuantileScore score(event_model, calib_cfg.grid);
                QuantileScoreExceedance eta(event_model, cfg.positivity_floor);
                auto result = calibrate(input.calib, score, censor_model.get(), &eta,
                                        event_model.get(), calib_cfg, method_from_name(m));
                row.beta_hat = result.beta_hat;
                row.flag = result.degenerate ? "degenerate" : "ok";

                LPBModel lpb(event_model, result.beta_hat);
                auto bound_fn = [&](std::span<const double> x) { return lpb.lower_bound(x); };
                std::vector<double> bounds;
                std::size_t sentinels = 0;
                if (synthetic) {
                    bounds.reserve(input.test_full.size());
                    for (const auto& r : input.test_full) bounds.push_back(bound_fn(r.covariates));
                    auto report =
                        make_report(m, est, "oracle", oracle_coverage(input.test_full, bound_fn),
                                    bounds, input.test_full.size(), &sentinels);
                    fill_from_report(row, report);
                    if (sentinels > 0) row.flag += ";sentinels=" + std::to_string(sentinels);
                    rows.push_back(row);
                } else {
                    std::optional<double> cov;
                    if (m == "aipcw")
                        cov = aipcw_coverage_metric(input.test_observed, score, *censor_model,
                                                    eta, result.beta_hat, cfg.positivity_floor);
                    else
                        cov = ipcw_coverage_metric(input.test_observed, score, *censor_model,
                                                   result.beta_hat, cfg.positivity_floor);
                    bounds.reserve(input.test_observed.size());
                    for (const auto& r : input.test_observed.records())
                        bounds.push_back(bound_fn(r.covariates));
                    auto report = make_report(m, est, m == "aipcw" ? "aipcw" : "ipcw",
                                              cov ? *cov : kNaN, bounds,
                                              input.test_observed.size(), &sentinels);
                    fill_from_report(row, report);
                    if (!cov) row.flag += ";missing";
                    if (sentinels > 0) row.flag += ";sentinels=" + std::to_string(sentinels);
                    rows.push_back(row);
                    // Companion outcome-regression metric for quantile LPBs.
                    auto or_row = row;
                    or_row.metric = "or";
                    or_row.coverage = or_coverage_metric(input.test_observed, *event_model,
                                                         *event_model, result.beta_hat);
                    rows.push_back(std::move(or_row));
                }
            } catch (const std::exception& ex) {
                row.flag = "error:" + std::string(ex.what());
                rows.push_back(std::move(row));
            }
        }
    }

    // Baselines do not depend on the survival estimators.
    SplitIndices split;
    Dataset pooled = input.train;
    for (const auto& rec : input.calib.records()) pooled.add(rec);
    split.train.resize(input.train.size());
    for (std::size_t i = 0; i < input.train.size(); ++i) split.train[i] = i;
    split.calib.resize(input.calib.size());
    for (std::size_t i = 0; i < input.calib.size(); ++i)
        split.calib[i] = input.train.size() + i;

    for (const auto& m : cfg.methods) {
        if (!is_baseline_name(m)) continue;
        auto row = base_row(cfg, rep);
        row.method = m;
        row.estimator = "linear";
        row.metric = synthetic ? "oracle" : "ipcw";
        row.n_test = synthetic ? input.test_full.size() : input.test_observed.size();
        try {
            auto lpb = make_baseline_lpb(pooled, baseline_from_name(m), cfg.alpha, split);
            auto bound_fn = [&](std::span<const double> x) { return lpb.lower_bound(x); };
            row.flag = "ok";
            std::vector<double> bounds;
            std::size_t sentinels = 0;
            if (synthetic) {
                for (const auto& r : input.test_full) bounds.push_back(bound_fn(r.covariates));
                auto report = make_report(m, "linear", "oracle",
                                          oracle_coverage(input.test_full, bound_fn), bounds,
                                          input.test_full.size(), &sentinels);
                fill_from_report(row, report);
            } else {
                auto cov = ipcw_coverage_metric(input.test_observed, bound_fn, /*censor*/
                                                *km_fit(input.train, TargetKind::CensoringTime),
                                                cfg.positivity_floor);
                for (const auto& r : input.test_observed.records())
                    bounds.push_back(bound_fn(r.covariates));
                auto report = make_report(m, "linear", "ipcw", cov ? *cov : kNaN, bounds,
                                          input.test_observed.size(), &sentinels);
                fill_from_report(row, report);
                if (!cov) row.flag += ";missing";
            }
            if (sentinels > 0) row.flag += ";sentinels=" + std::to_string(sentinels);
        } catch (const std::exception& ex) {
            row.flag = "error:" + std::string(ex.what());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    Dataset csv_data;
    const bool has_csv = !config.csv_path.empty();
    if (has_csv) csv_data = read_dataset_csv_file(config.csv_path);

    const std::size_t reps = config.replications;
    std::vector<std::vector<ResultRow>> per_rep(reps);
    if (reps == 0) return {};

    unsigned n_threads = threads == 0 ? std::thread::hardware_concurrency() : threads;
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(reps)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= reps) return;
            try {
                per_rep[rep] =
                    run_replication(config, has_csv ? &csv_data : nullptr, rep);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<ResultRow> rows;
    for (auto& chunk : per_rep)
        for (auto& row : chunk) rows.push_back(std::move(row));
    return rows;
}

namespace {

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

double parse_csv_number(const std::string& s) {
    if (s.empty()) return kNaN;
    return std::stod(s);
}

}  // namespace

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::string out =
        "replication,setting,method,estimator,metric,alpha,beta_hat,coverage,mean_lpb,"
        "median_lpb,n_test,flag\n";
    for (const auto& r : rows) {
        out += std::to_string(r.replication) + ',' + r.setting + ',' + r.method + ',' +
               r.estimator + ',' + r.metric + ',' + format_double(r.alpha) + ',' +
               csv_number(r.beta_hat) + ',' + csv_number(r.coverage) + ',' +
               csv_number(r.mean_lpb) + ',' + csv_number(r.median_lpb) + ',' +
               std::to_string(r.n_test) + ',' + r.flag + '\n';
    }
    return out;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << results_to_csv(rows);
}

std::vector<ResultRow> read_results_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("results file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expected =
        "replication,setting,method,estimator,metric,alpha,beta_hat,coverage,mean_lpb,"
        "median_lpb,n_test,flag";
    if (line != expected)
        throw std::runtime_error("results file has an unexpected schema: " + path);

    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) f.push_back(field);
        while (f.size() < 12) f.emplace_back();
        if (f.size() != 12)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": expected 12 fields");
        ResultRow r;
        r.replication = static_cast<std::size_t>(std::stoull(f[0]));
        r.setting = f[1];
        r.method = f[2];
        r.estimator = f[3];
        r.metric = f[4];
        r.alpha = parse_csv_number(f[5]);
        r.beta_hat = parse_csv_number(f[6]);
        r.coverage = parse_csv_number(f[7]);
        r.mean_lpb = parse_csv_number(f[8]);
        r.median_lpb = parse_csv_number(f[9]);
        r.n_test = static_cast<std::size_t>(std::stoull(f[10]));
        r.flag = f[11];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SummaryRow> aggregate(const std::vector<ResultRow>& rows) {
    using Key = std::tuple<std::string, std::string, std::string, std::string, double>;
    struct Acc {
        std::size_t n = 0;
        double sum = 0.0, sumsq = 0.0;
        double min = std::numeric_limits<double>::infinity();
        double max = -std::numeric_limits<double>::infinity();
        double lpb_sum = 0.0;
        std::size_t lpb_n = 0;
    };
    std::map<Key, Acc> groups;
    for (const auto& r : rows) {
        if (r.flag.rfind("error:", 0) == 0 || !std::isfinite(r.coverage)) continue;
        auto& acc = groups[{r.setting, r.method, r.estimator, r.metric, r.alpha}];
        ++acc.n;
        acc.sum += r.coverage;
        acc.sumsq += r.coverage * r.coverage;
        acc.min = std::min(acc.min, r.coverage);
        acc.max = std::max(acc.max, r.coverage);
        if (std::isfinite(r.mean_lpb)) {
            acc.lpb_sum += r.mean_lpb;
            ++acc.lpb_n;
        }
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, acc] : groups) {
        SummaryRow s;
        std::tie(s.setting, s.method, s.estimator, s.metric, s.alpha) = key;
        s.n = acc.n;
        const double n = static_cast<double>(acc.n);
        s.mean_coverage = acc.sum / n;
        s.sd_coverage =
            acc.n > 1 ? std::sqrt(std::max(0.0, (acc.sumsq - acc.sum * acc.sum / n) / (n - 1.0)))
                      : 0.0;
        s.min_coverage = acc.min;
        s.max_coverage = acc.max;
        s.mean_mean_lpb = acc.lpb_n > 0 ? acc.lpb_sum / static_cast<double>(acc.lpb_n) : kNaN;
        out.push_back(std::move(s));
    }
    return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "setting,method,estimator,metric,alpha,n,mean_coverage,sd_coverage,min_coverage,"
        "max_coverage,mean_mean_lpb\n";
    for (const auto& r : rows) {
        out += r.setting + ',' + r.method + ',' + r.estimator + ',' + r.metric + ',' +
               format_double(r.alpha) + ',' + std::to_string(r.n) + ',' +
               csv_number(r.mean_coverage) + ',' + csv_number(r.sd_coverage) + ',' +
               csv_number(r.min_coverage) + ',' + csv_number(r.max_coverage) + ',' +
               csv_number(r.mean_mean_lpb) + '\n';
    }
    return out;
}

std::string calibrate_dataset_json(const ExperimentConfig& config, const Dataset& data,
                                   uint64_t seed) {
    config.validate();
    const double frac = static_cast<double>(config.n_calib) /
                        static_cast<double>(config.n_train + config.n_calib);
    const auto split = split_dataset(data, frac, seed);
    const auto train = data.subset(split.train);
    const auto calib = data.subset(split.calib);

    CalibrationConfig calib_cfg;
    calib_cfg.alpha = config.alpha;
    calib_cfg.grid = BetaGrid::from_step(config.grid_step);
    calib_cfg.positivity_floor = config.positivity_floor;

    nlohmann::json out;
    out["alpha"] = config.alpha;
    out["grid_step"] = config.grid_step;
    out["seed"] = seed;
    out["n_train"] = train.size();
    out["n_calib"] = calib.size();
    out["results"] = nlohmann::json::array();

    for (const auto& est : config.estimators) {
        auto event_model = fit_estimator(est, train, TargetKind::EventTime, config.knn_k);
        auto censor_model = fit_estimator(est, train, TargetKind::CensoringTime, config.knn_k);
        QuantileScore score(event_model, calib_cfg.grid);
        QuantileScoreExceedance eta(event_model, config.positivity_floor);

        std::string event_json, censor_json;
        try {
            event_json = model_to_json(*event_model);
            censor_json = model_to_json(*censor_model);
        } catch (const std::exception&) {
            // k-NN models have no closed-form serialization; omit them.
        }

        for (const auto& m : config.methods) {
            if (!is_calibration_method(m)) continue;
            auto result = calibrate(calib, score, censor_model.get(), &eta, event_model.get(),
                                    calib_cfg, method_from_name(m));
            LPBModel lpb(event_model, result.beta_hat);
            nlohmann::json entry;
            entry["estimator"] = est;
            entry["method"] = m;
            entry["beta_hat"] = result.beta_hat;
            entry["degenerate"] = result.degenerate;
            auto bounds = nlohmann::json::array();
            for (const auto& rec : data.records()) {
                const double b = lpb.lower_bound(rec.covariates);
                if (std::isfinite(b))
                    bounds.push_back(b);
                else
                    bounds.push_back(nullptr);  // sentinel: no finite bound at this level
            }
            entry["lpb"] = std::move(bounds);
            if (!event_json.empty()) {
                entry["event_model"] = nlohmann::json::parse(event_json);
                entry["censor_model"] = nlohmann::json::parse(censor_json);
            }
            out["results"].push_back(std::move(entry));
        }
    }
    return out.dump(2);
}

}  // namespace survlpb
