#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "survlpb/data.hpp"
#include "survlpb/experiment.hpp"
#include "survlpb/format.hpp"
#include "survlpb/random.hpp"
#include "survlpb/synthetic.hpp"

using namespace survlpb;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.setting = 1;
    cfg.n_train = 120;
    cfg.n_calib = 120;
    cfg.n_test = 100;
    cfg.replications = 2;
    cfg.methods = {"ipcw"};
    cfg.estimators = {"cox"};
    cfg.master_seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("config json round trip and validation") {
    auto cfg = small_config();
    auto back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.setting == cfg.setting);
    CHECK(back.n_train == cfg.n_train);
    CHECK(back.methods == cfg.methods);
    CHECK(back.master_seed == cfg.master_seed);

    auto bad = cfg;
    bad.methods = {"nonsense"};
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.grid_step = 0.0003;  // does not divide 1 evenly
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.alpha = 0.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("run shape: one row per replication, method, estimator") {
    auto cfg = small_config();
    auto rows = run_experiment(cfg, 1);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.method == "ipcw");
        CHECK(row.estimator == "cox");
        CHECK(row.metric == "oracle");
        CHECK(row.coverage >= 0.0);
        CHECK(row.coverage <= 1.0);
        CHECK(row.n_test == 100);
        CHECK(row.flag.substr(0, 2) == "ok");
    }
    CHECK(rows[0].replication == 0);
    CHECK(rows[1].replication == 1);
}

TEST_CASE("zero replications yield an empty table") {
    auto cfg = small_config();
    cfg.replications = 0;
    auto rows = run_experiment(cfg, 1);
    CHECK(rows.empty());
    CHECK(results_to_csv(rows) ==
          "replication,setting,method,estimator,metric,alpha,beta_hat,coverage,mean_lpb,"
          "median_lpb,n_test,flag\n");
}

TEST_CASE("results are byte-identical across thread counts") {
    auto cfg = small_config();
    cfg.replications = 4;
    cfg.methods = {"ipcw", "or", "qr_y"};
    const auto csv1 = results_to_csv(run_experiment(cfg, 1));
    const auto csv3 = results_to_csv(run_experiment(cfg, 3));
    CHECK(csv1 == csv3);
}

TEST_CASE("results csv round trips through the reader") {
    auto cfg = small_config();
    cfg.methods = {"ipcw", "cqr_y"};
    auto rows = run_experiment(cfg, 1);
    const auto path = std::string("/tmp/survlpb_test_results.csv");
    write_results_csv(path, rows);
    auto back = read_results_csv_file(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].method == rows[i].method);
        CHECK(back[i].coverage == rows[i].coverage);
        if (std::isnan(rows[i].beta_hat))
            CHECK(std::isnan(back[i].beta_hat));  // baselines carry no level
        else
            CHECK(back[i].beta_hat == rows[i].beta_hat);
        CHECK(back[i].flag == rows[i].flag);
    }
}

TEST_CASE("aggregate computes grouped descriptive statistics") {
    std::vector<ResultRow> rows(2);
    rows[0] = {0, "1", "ipcw", "cox", "oracle", 0.1, 0.1, 0.88, 1.0, 1.0, 10, "ok"};
    rows[1] = {1, "1", "ipcw", "cox", "oracle", 0.1, 0.1, 0.92, 2.0, 2.0, 10, "ok"};
    auto summary = aggregate(rows);
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].n == 2);
    CHECK(summary[0].mean_coverage == doctest::Approx(0.90));
    CHECK(summary[0].sd_coverage == doctest::Approx(0.0283).epsilon(1e-2));
    CHECK(summary[0].min_coverage == 0.88);
    CHECK(summary[0].max_coverage == 0.92);
    CHECK(summary[0].mean_mean_lpb == doctest::Approx(1.5));

    // Single row: sd 0. Error rows are excluded.
    rows.resize(1);
    auto single = aggregate(rows);
    CHECK(single[0].sd_coverage == 0.0);
    rows[0].flag = "error:boom";
    CHECK(aggregate(rows).empty());
    CHECK(aggregate({}).empty());
}

TEST_CASE("csv-input runs use censored-data metrics") {
    // Synthesize a dataset file, then evaluate with random splits.
    auto full = generate(setting_spec(1), 400, 5);
    Dataset data(2);
    for (const auto& rec : full) data.add(rec.observed());
    const std::string path = "/tmp/survlpb_test_data.csv";
    {
        std::ofstream out(path);
        write_dataset_csv(out, data);
    }
    ExperimentConfig cfg;
    cfg.csv_path = path;
    cfg.n_train = 150;
    cfg.n_calib = 150;
    cfg.n_test = 100;
    cfg.replications = 2;
    cfg.methods = {"ipcw", "aipcw", "cor"};
    cfg.estimators = {"km"};
    cfg.master_seed = 7;

    auto rows = run_experiment(cfg, 2);
    // Each calibrated method yields its weighting metric plus the
    // outcome-regression companion row.
    REQUIRE(rows.size() == 2 * 3 * 2);
    std::size_t or_rows = 0, ipcw_rows = 0, aipcw_rows = 0;
    for (const auto& row : rows) {
        if (row.metric == "or") ++or_rows;
        if (row.metric == "ipcw") ++ipcw_rows;
        if (row.metric == "aipcw") ++aipcw_rows;
        CHECK(row.setting == "csv");
        if (std::isfinite(row.coverage)) {
            CHECK(row.coverage >= 0.0);
            CHECK(row.coverage <= 1.5);
        }
    }
    CHECK(or_rows == 6);
    CHECK(ipcw_rows == 4);
    CHECK(aipcw_rows == 2);
}

TEST_CASE("failed fits are recorded as error rows, not dropped") {
    // A constant covariate makes the Cox information matrix singular; every
    // (replication, method) pair must still appear, flagged.
    Dataset data(1);
    rng::Engine eng(3);
    for (int i = 0; i < 60; ++i)
        data.add(ObservedRecord{{1.0}, 0.1 + eng.uniform(), eng.uniform() < 0.7});
    const std::string path = "/tmp/survlpb_test_constant.csv";
    {
        std::ofstream out(path);
        write_dataset_csv(out, data);
    }
    ExperimentConfig cfg;
    cfg.csv_path = path;
    cfg.n_train = 20;
    cfg.n_calib = 20;
    cfg.n_test = 20;
    cfg.replications = 2;
    cfg.methods = {"ipcw", "or"};
    cfg.estimators = {"cox"};
    auto rows = run_experiment(cfg, 1);
    REQUIRE(rows.size() == 4);  // 2 replications x 2 methods
    for (const auto& row : rows) {
        CHECK(row.flag.rfind("error:", 0) == 0);
        CHECK(std::isnan(row.coverage));
    }
    CHECK(aggregate(rows).empty());
}

TEST_CASE("calibrate-dataset json lists levels, bounds and models") {
    auto full = generate(setting_spec(1), 300, 21);
    Dataset data(2);
    for (const auto& rec : full) data.add(rec.observed());

    ExperimentConfig cfg;
    cfg.setting = 1;
    cfg.n_train = 150;
    cfg.n_calib = 150;
    cfg.methods = {"ipcw", "or"};
    cfg.estimators = {"cox"};
    auto text = calibrate_dataset_json(cfg, data, 11);
    CHECK(text.find("\"beta_hat\"") != std::string::npos);
    CHECK(text.find("\"lpb\"") != std::string::npos);
    CHECK(text.find("\"event_model\"") != std::string::npos);
    CHECK(text.find("\"coefficients\"") != std::string::npos);
}

TEST_CASE("number formatting is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    double parsed = std::stod(format_double(0.30000000000000004));
    CHECK(parsed == 0.30000000000000004);
}
