#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "survlpb/data.hpp"
#include "survlpb/experiment.hpp"

namespace {

survlpb::ExperimentConfig load_config(const std::string& path, const std::string& out_override,
                                      bool seed_set, uint64_t seed_override) {
    auto cfg = survlpb::ExperimentConfig::from_json_file(path);
    if (!out_override.empty()) cfg.output = out_override;
    if (seed_set) cfg.master_seed = seed_override;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Calibrated lower predictive bounds for right-censored survival times"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_path;
    unsigned threads = 0;
    uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> inputs;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option_function<uint64_t>(
               "--seed", [&](uint64_t v) { seed = v; seed_set = true; },
               "Override the master seed from the config");
    };

    auto* simulate = app.add_subcommand("simulate", "Run the synthetic benchmark replications");
    simulate->add_option("--config", config_path, "Experiment config JSON")->required();
    simulate->add_option("--out", out_path, "Results CSV path (overrides config)");
    simulate->add_option("--threads", threads, "Worker threads (0 = auto)");
    add_seed(simulate);

    auto* calibrate = app.add_subcommand(
        "calibrate", "Fit and calibrate on a dataset CSV; emit levels and per-subject bounds");
    calibrate->add_option("--config", config_path, "Experiment config JSON")->required();
    calibrate->add_option("--data", data_path, "Dataset CSV (x1..xd,time,event)")->required();
    calibrate->add_option("--out", out_path, "Output JSON path");
    add_seed(calibrate);

    auto* evaluate = app.add_subcommand(
        "evaluate", "Split/fit/calibrate a dataset CSV repeatedly and report censored-data coverage");
    evaluate->add_option("--config", config_path, "Experiment config JSON")->required();
    evaluate->add_option("--data", data_path, "Dataset CSV (x1..xd,time,event)")->required();
    evaluate->add_option("--out", out_path, "Results CSV path (overrides config)");
    evaluate->add_option("--threads", threads, "Worker threads (0 = auto)");
    add_seed(evaluate);

    auto* aggregate = app.add_subcommand("aggregate", "Summarize one or more results CSVs");
    aggregate->add_option("inputs", inputs, "Results CSV files")->required();
    aggregate->add_option("--out", out_path, "Summary CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            auto cfg = load_config(config_path, out_path, seed_set, seed);
            if (!cfg.csv_path.empty())
                throw std::runtime_error("simulate expects a synthetic setting; use evaluate for CSV data");
            auto rows = survlpb::run_experiment(cfg, threads);
            if (cfg.output.empty()) {
                std::cout << survlpb::results_to_csv(rows);
            } else {
                survlpb::write_results_csv(cfg.output, rows);
                std::cerr << "wrote " << rows.size() << " rows to " << cfg.output << "\n";
            }
        } else if (calibrate->parsed()) {
            auto cfg = load_config(config_path, "", seed_set, seed);
            auto data = survlpb::read_dataset_csv_file(data_path);
            auto json = survlpb::calibrate_dataset_json(cfg, data, cfg.master_seed);
            if (out_path.empty()) {
                std::cout << json << "\n";
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot open output file: " + out_path);
                out << json << "\n";
                std::cerr << "wrote calibration to " << out_path << "\n";
            }
        } else if (evaluate->parsed()) {
            auto cfg = load_config(config_path, out_path, seed_set, seed);
            cfg.csv_path = data_path;
            auto rows = survlpb::run_experiment(cfg, threads);
            if (cfg.output.empty()) {
                std::cout << survlpb::results_to_csv(rows);
            } else {
                survlpb::write_results_csv(cfg.output, rows);
                std::cerr << "wrote " << rows.size() << " rows to " << cfg.output << "\n";
            }
        } else if (aggregate->parsed()) {
            std::vector<survlpb::ResultRow> rows;
            for (const auto& path : inputs) {
                auto part = survlpb::read_results_csv_file(path);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            auto summary = survlpb::summary_to_csv(survlpb::aggregate(rows));
            if (out_path.empty()) {
                std::cout << summary;
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot open output file: " + out_path);
                out << summary;
            }
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
