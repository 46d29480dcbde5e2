#include <doctest.h>

#include <cmath>
#include <map>

#include "survlpb/estimators.hpp"
#include "survlpb/random.hpp"
#include "survlpb/synthetic.hpp"

using namespace survlpb;

namespace {

Dataset make_data(const std::vector<double>& times, const std::vector<int>& events,
                  const std::vector<std::vector<double>>& covs = {}) {
    const std::size_t d = covs.empty() ? 1 : covs.front().size();
    Dataset data(d);
    for (std::size_t i = 0; i < times.size(); ++i) {
        ObservedRecord rec;
        rec.covariates = covs.empty() ? std::vector<double>(1, 0.0) : covs[i];
        rec.time = times[i];
        rec.event = events[i] != 0;
        data.add(rec);
    }
    return data;
}

// Independent product-limit oracle: walk the distinct times literally.
StepSurvivalCurve km_oracle(const std::vector<double>& times, const std::vector<int>& events) {
    std::map<double, std::pair<int, int>> groups;  // time -> (deaths, total leaving)
    for (std::size_t i = 0; i < times.size(); ++i) {
        auto& g = groups[times[i]];
        if (events[i]) ++g.first;
        ++g.second;
    }
    std::vector<double> knots, values;
    double surv = 1.0;
    int at_risk = static_cast<int>(times.size());
    for (const auto& [t, g] : groups) {
        if (g.first > 0) {
            surv *= 1.0 - static_cast<double>(g.first) / static_cast<double>(at_risk);
            knots.push_back(t);
            values.push_back(std::max(0.0, surv));
        }
        at_risk -= g.second;
    }
    return StepSurvivalCurve(knots, values);
}

Dataset observed_dataset(const std::vector<FullRecord>& full) {
    Dataset data(full.front().covariates.size());
    for (const auto& rec : full) data.add(rec.observed());
    return data;
}

}  // namespace

TEST_CASE("kaplan-meier hand cases") {
    auto model = km_fit(make_data({1, 2, 3}, {1, 0, 1}), TargetKind::EventTime);
    const auto& curve = model->curve();
    CHECK(curve.value_at(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(curve.value_at(2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(curve.value_at(3.0) == 0.0);

    auto none = km_fit(make_data({1, 2, 3}, {0, 0, 0}), TargetKind::EventTime);
    CHECK(none->curve().size() == 0);
    CHECK(none->curve().value_at(10.0) == 1.0);

    auto tied = km_fit(make_data({1, 1, 2}, {1, 1, 1}), TargetKind::EventTime);
    CHECK(tied->curve().value_at(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(tied->curve().value_at(2.0) == 0.0);

    // Largest observation censored: flat tail, no forced drop to zero.
    auto flat = km_fit(make_data({1, 2, 3}, {1, 1, 0}), TargetKind::EventTime);
    CHECK(flat->curve().value_at(100.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    CHECK_THROWS(km_fit(Dataset(1), TargetKind::EventTime));
}

TEST_CASE("kaplan-meier matches the oracle exhaustively for n <= 6") {
    for (std::size_t n = 1; n <= 6; ++n) {
        // All event patterns, on distinct times and on a tied layout.
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> events(n);
            for (std::size_t i = 0; i < n; ++i) events[i] = (mask >> i) & 1u;

            std::vector<double> distinct(n), tied(n);
            for (std::size_t i = 0; i < n; ++i) {
                distinct[i] = static_cast<double>(i + 1);
                tied[i] = static_cast<double>(i / 2 + 1);
            }
            for (const auto& times : {distinct, tied}) {
                auto fitted = km_fit(make_data(times, events), TargetKind::EventTime);
                auto oracle = km_oracle(times, events);
                REQUIRE(fitted->curve().knots() == oracle.knots());
                for (std::size_t k = 0; k < oracle.size(); ++k)
                    CHECK(fitted->curve().values()[k] == oracle.values()[k]);
            }
        }
    }
}

TEST_CASE("censoring-target fit equals event-target fit on the flipped data") {
    survlpb::rng::Engine eng(11);
    std::vector<double> times;
    std::vector<int> events;
    for (int i = 0; i < 40; ++i) {
        times.push_back(0.1 + eng.uniform() * 5.0);
        events.push_back(eng.uniform() < 0.5 ? 1 : 0);
    }
    std::vector<int> flipped(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) flipped[i] = 1 - events[i];

    auto censor = km_fit(make_data(times, events), TargetKind::CensoringTime);
    auto event = km_fit(make_data(times, flipped), TargetKind::EventTime);
    CHECK(censor->curve().knots() == event->curve().knots());
    CHECK(censor->curve().values() == event->curve().values());
}

TEST_CASE("cox fit recovers the generating coefficients") {
    // T | X is exponential with rate exp(-x1 + x2): a proportional hazards
    // model with constant baseline and coefficients (-1, 1).
    auto full = generate(setting_spec(1), 2000, 321);
    auto data = observed_dataset(full);
    auto model = cox_fit(data, TargetKind::EventTime);
    REQUIRE(model->coefficients().size() == 2);
    CHECK(model->coefficients()[0] == doctest::Approx(-1.0).epsilon(0.15));
    CHECK(model->coefficients()[1] == doctest::Approx(1.0).epsilon(0.15));
    CHECK(model->final_gradient_norm <= 1e-8);

    // Censoring is independent of the covariates: coefficients near zero.
    auto censor = cox_fit(data, TargetKind::CensoringTime);
    CHECK(std::abs(censor->coefficients()[0]) < 0.1);
    CHECK(std::abs(censor->coefficients()[1]) < 0.1);
}

TEST_CASE("cox fit with one null binary covariate") {
    survlpb::rng::Engine eng(5);
    Dataset data(1);
    for (int i = 0; i < 2000; ++i) {
        ObservedRecord rec;
        rec.covariates = {static_cast<double>(i % 2)};
        rec.time = eng.exponential(1.0);  // same law in both groups
        rec.event = true;
        data.add(rec);
    }
    auto model = cox_fit(data, TargetKind::EventTime);
    CHECK(std::abs(model->coefficients()[0]) < 0.1);
}

TEST_CASE("cox newton ascends monotonically and is symmetric in the target") {
    auto full = generate(setting_spec(1), 500, 71);
    auto data = observed_dataset(full);
    auto model = cox_fit(data, TargetKind::EventTime);
    REQUIRE(model->loglik_trace.size() >= 2);
    for (std::size_t i = 1; i < model->loglik_trace.size(); ++i) {
        const double noise = 1e-9 * (std::abs(model->loglik_trace[i - 1]) + 1.0);
        CHECK(model->loglik_trace[i] >= model->loglik_trace[i - 1] - noise);
    }

    // CensoringTime on the data equals EventTime on the flipped data.
    Dataset flipped(data.dim());
    for (const auto& rec : data.records()) {
        auto copy = rec;
        copy.event = !rec.event;
        flipped.add(copy);
    }
    auto censor = cox_fit(data, TargetKind::CensoringTime);
    auto event_on_flipped = cox_fit(flipped, TargetKind::EventTime);
    CHECK(censor->coefficients() == event_on_flipped->coefficients());
    CHECK(censor->baseline_cumhaz().knots() == event_on_flipped->baseline_cumhaz().knots());
    CHECK(censor->baseline_cumhaz().increments() ==
          event_on_flipped->baseline_cumhaz().increments());
}

TEST_CASE("cox fit rejects degenerate inputs") {
    CHECK_THROWS_AS(cox_fit(make_data({1, 2, 3}, {0, 0, 0}), TargetKind::EventTime), CoxFitError);

    // A constant covariate has no information.
    Dataset constant(1);
    for (int i = 0; i < 10; ++i)
        constant.add(ObservedRecord{{1.0}, static_cast<double>(i + 1), true});
    CHECK_THROWS_AS(cox_fit(constant, TargetKind::EventTime), CoxFitError);
}

TEST_CASE("cox prediction matches the closed form and is monotone") {
    auto full = generate(setting_spec(1), 300, 9);
    auto data = observed_dataset(full);
    auto model = cox_fit(data, TargetKind::EventTime);

    const std::vector<double> x{0.3, -0.7};
    const auto curve = model->predict_curve(x);
    const double risk = std::exp(model->linear_predictor(x));
    double prev = 1.0;
    for (std::size_t k = 0; k < curve.size(); ++k) {
        const double expected =
            std::exp(-model->baseline_cumhaz().cumulative()[k] * risk);
        CHECK(curve.values()[k] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(curve.values()[k] <= prev);
        prev = curve.values()[k];
    }
    CHECK(model->survival_at(x, 0.5) == doctest::Approx(curve.value_at(0.5)).epsilon(1e-12));
}

TEST_CASE("cox model json round trip") {
    auto full = generate(setting_spec(1), 200, 17);
    auto model = cox_fit(observed_dataset(full), TargetKind::EventTime);
    auto back = CoxModel::from_json(model->to_json());
    CHECK(back->coefficients() == model->coefficients());
    CHECK(back->covariate_means() == model->covariate_means());
    CHECK(back->baseline_cumhaz().knots() == model->baseline_cumhaz().knots());
    CHECK(back->baseline_cumhaz().increments() == model->baseline_cumhaz().increments());

    auto generic = model_from_json(model_to_json(*model));
    const std::vector<double> x{0.1, 0.2};
    CHECK(generic->survival_at(x, 1.0) == model->survival_at(x, 1.0));
}

TEST_CASE("knn with k = n reduces to the marginal kaplan-meier") {
    auto full = generate(setting_spec(1), 100, 23);
    auto data = observed_dataset(full);
    auto knn = knn_km_fit(data, TargetKind::EventTime, data.size());
    auto km = km_fit(data, TargetKind::EventTime);
    const std::vector<double> x{0.0, 0.0};
    auto a = knn->predict_curve(x);
    const auto& b = km->curve();
    CHECK(a.knots() == b.knots());
    CHECK(a.values() == b.values());

    CHECK_THROWS(knn_km_fit(data, TargetKind::EventTime, data.size() + 1));
}

TEST_CASE("knn recovers per-cluster survival in separated clusters") {
    // Two well-separated covariate clusters with different exponential rates.
    survlpb::rng::Engine eng(37);
    const std::size_t per_cluster = 300;
    Dataset data(1);
    Dataset cluster_a(1);
    for (std::size_t i = 0; i < 2 * per_cluster; ++i) {
        const bool in_a = i < per_cluster;
        ObservedRecord rec;
        rec.covariates = {in_a ? 0.0 : 100.0};
        rec.time = eng.exponential(in_a ? 2.0 : 0.2);
        rec.event = true;
        data.add(rec);
        if (in_a) cluster_a.add(rec);
    }
    auto knn = knn_km_fit(data, TargetKind::EventTime, per_cluster);
    auto local = knn->predict_curve(std::vector<double>{0.0});
    auto oracle = km_fit(cluster_a, TargetKind::EventTime)->curve();
    CHECK(local.knots() == oracle.knots());
    CHECK(local.values() == oracle.values());

    // Against the generating law: a Dvoretzky-style band at this sample size.
    const double band = std::sqrt(std::log(2.0 / 0.001) / (2.0 * per_cluster));
    for (double t : {0.2, 0.5, 1.0}) {
        CHECK(std::abs(local.value_at(t) - std::exp(-2.0 * t)) < band);
    }
}

TEST_CASE("knn tie-break by index is deterministic under duplicates") {
    Dataset data(1);
    for (int i = 0; i < 10; ++i) {
        ObservedRecord rec;
        rec.covariates = {0.0};  // all duplicated
        rec.time = static_cast<double>(i + 1);
        rec.event = i % 2 == 0;
        data.add(rec);
    }
    auto knn = knn_km_fit(data, TargetKind::EventTime, 3);
    auto a = knn->predict_curve(std::vector<double>{0.0});
    auto b = knn->predict_curve(std::vector<double>{0.0});
    CHECK(a.knots() == b.knots());
    CHECK(a.values() == b.values());
    // Smallest indices win: records 0,1,2 with times 1,2,3 and events 1,0,1.
    auto expected = km_fit(make_data({1, 2, 3}, {1, 0, 1}), TargetKind::EventTime)->curve();
    CHECK(a.knots() == expected.knots());
    CHECK(a.values() == expected.values());
}

TEST_CASE("knn default size rule") {
    CHECK(knn_default_k(10) == 10);
    CHECK(knn_default_k(100) == 50);
    CHECK(knn_default_k(1000) == 200);
}
