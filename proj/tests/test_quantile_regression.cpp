#include <doctest.h>

#include <cmath>

#include "survlpb/quantile_regression.hpp"
#include "survlpb/random.hpp"

using namespace survlpb;

namespace {

std::vector<std::vector<double>> empty_design(std::size_t n) {
    return std::vector<std::vector<double>>(n, std::vector<double>{});
}

}  // namespace

TEST_CASE("intercept-only fit lands on the sample quantile") {
    std::vector<double> y{1, 2, 3, 4, 5};
    auto model = pinball_qr_fit(empty_design(y.size()), y, 0.5);
    CHECK(model.intercept == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(model.coefficients.empty());
}

TEST_CASE("perfectly linear data is interpolated to zero loss") {
    rng::Engine eng(1);
    for (double tau : {0.1, 0.5, 0.9}) {
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (int i = 0; i < 24; ++i) {
            const double x = -2.0 + 0.25 * i + 0.05 * eng.uniform();
            X.push_back({x});
            y.push_back(2.0 + 3.0 * x);
        }
        auto model = pinball_qr_fit(X, y, tau);
        CHECK(pinball_loss(model, X, y) <= 1e-6);
    }
}

TEST_CASE("intercept-only normal quantile recovery") {
    rng::Engine eng(77);
    std::vector<double> y(5000);
    for (auto& v : y) v = eng.normal();
    auto model = pinball_qr_fit(empty_design(y.size()), y, 0.1);
    CHECK(std::abs(model.intercept - (-1.2816)) <= 0.08);
}

TEST_CASE("objective never exceeds the starting value and improves with budget") {
    rng::Engine eng(5);
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 200; ++i) {
        const double x = eng.normal();
        X.push_back({x, x * x});
        y.push_back(1.0 + 0.5 * x + eng.exponential(1.0));
    }
    const double tau = 0.25;

    // Start = empirical quantile intercept with zero slopes.
    LinearQuantileModel start;
    start.tau = tau;
    start.coefficients = {0.0, 0.0};
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    start.intercept = sorted[static_cast<std::size_t>(std::ceil(tau * y.size())) - 1];
    const double start_obj = pinball_loss(start, X, y);

    PinballOptConfig small{200, 0};
    PinballOptConfig large{5000, 0};
    const double small_obj = pinball_loss(pinball_qr_fit(X, y, tau, small), X, y);
    const double large_obj = pinball_loss(pinball_qr_fit(X, y, tau, large), X, y);
    CHECK(small_obj <= start_obj + 1e-12);
    CHECK(large_obj <= small_obj + 1e-12);

    PinballOptConfig polished{5000, 50};
    const double polished_obj = pinball_loss(pinball_qr_fit(X, y, tau, polished), X, y);
    CHECK(polished_obj <= large_obj + 1e-12);
}

TEST_CASE("degenerate designs are rejected") {
    std::vector<std::vector<double>> X{{1.0}, {2.0}};
    std::vector<double> y{1.0, 2.0};
    CHECK_THROWS(pinball_qr_fit(X, y, 0.5));        // n <= d + 1
    CHECK_THROWS(pinball_qr_fit(X, y, 0.0));
    std::vector<std::vector<double>> ragged{{1.0}, {2.0, 3.0}, {4.0}};
    std::vector<double> y3{1.0, 2.0, 3.0};
    CHECK_THROWS(pinball_qr_fit(ragged, y3, 0.5));
}

namespace {

Dataset linear_world(rng::Engine& eng, std::size_t n, bool censored, double huge_censor = 0.0) {
    Dataset data(1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = eng.normal();
        const double t = std::exp(0.5 * x) * eng.exponential(1.0) + 0.05;
        double c = huge_censor > 0.0 ? huge_censor : 0.05 + eng.exponential(0.25);
        if (!censored) c = t + 1.0;
        ObservedRecord rec;
        rec.covariates = {x};
        rec.time = std::min(t, c);
        rec.event = t <= c;
        data.add(rec);
    }
    return data;
}

SplitIndices half_split(std::size_t n) {
    SplitIndices split;
    for (std::size_t i = 0; i < n / 2; ++i) split.train.push_back(i);
    for (std::size_t i = n / 2; i < n; ++i) split.calib.push_back(i);
    return split;
}

}  // namespace

TEST_CASE("conformal correction keeps the bound below the fitted quantile when scores are negative") {
    rng::Engine eng(17);
    auto data = linear_world(eng, 200, false);
    auto split = half_split(data.size());
    auto cqr = make_baseline_lpb(data, BaselineMethod::CQR_Y, 0.1, split);
    // Scores q(x) - y at tau = 0.1 are mostly negative; the correction is a
    // high quantile of them and can take either sign, but the bound moves by
    // exactly that amount.
    std::vector<double> x{0.3};
    CHECK(cqr.lower_bound(x) == doctest::Approx(cqr.model.predict(x) - cqr.correction));

    // All-negative scores force a correction <= 0, so the bound dominates
    // the raw prediction.
    Dataset shifted(1);
    for (const auto& rec : data.records()) {
        auto copy = rec;
        copy.time = rec.time + 100.0;  // every score q - y becomes negative
        shifted.add(copy);
    }
    auto cqr2 = make_baseline_lpb(shifted, BaselineMethod::CQR_Y, 0.1, split);
    CHECK(cqr2.correction <= 0.0);
    CHECK(cqr2.lower_bound(x) >= cqr2.model.predict(x));
}

TEST_CASE("qr on fully uncensored data treats Y and T identically") {
    rng::Engine eng(19);
    auto data = linear_world(eng, 160, false);
    auto split = half_split(data.size());
    auto qy = make_baseline_lpb(data, BaselineMethod::QR_Y, 0.1, split);
    auto qt = make_baseline_lpb(data, BaselineMethod::QR_T, 0.1, split);
    CHECK(qy.model.intercept == qt.model.intercept);
    CHECK(qy.model.coefficients == qt.model.coefficients);
    CHECK(qy.correction == qt.correction);
}

TEST_CASE("complete-case variants reject fully censored data") {
    Dataset data(1);
    for (int i = 0; i < 20; ++i)
        data.add(ObservedRecord{{static_cast<double>(i)}, 1.0 + i, false});
    auto split = half_split(data.size());
    CHECK_THROWS(make_baseline_lpb(data, BaselineMethod::QR_T, 0.1, split));
    CHECK_THROWS(make_baseline_lpb(data, BaselineMethod::CQR_T, 0.1, split));
}

TEST_CASE("split conformal coverage guarantee on exchangeable uncensored data") {
    rng::Engine eng(23);
    const int reps = 200;
    const std::size_t n_test = 100;
    std::size_t covered = 0;
    for (int rep = 0; rep < reps; ++rep) {
        auto data = linear_world(eng, 300, false);
        auto split = half_split(data.size());
        auto cqr = make_baseline_lpb(data, BaselineMethod::CQR_Y, 0.1, split,
                                     PinballOptConfig{1500, 30});
        auto test = linear_world(eng, n_test, false);
        for (const auto& rec : test.records())
            if (rec.time >= cqr.lower_bound(rec.covariates)) ++covered;
    }
    const double coverage = static_cast<double>(covered) / (reps * n_test);
    const double se = std::sqrt(0.9 * 0.1 / (reps * n_test));
    CHECK(coverage >= 0.9 - 3.0 * se);
}

TEST_CASE("a bound for Y is pointwise conservative for T") {
    rng::Engine eng(27);
    std::vector<FullRecord> full;
    Dataset observed(1);
    for (int i = 0; i < 400; ++i) {
        FullRecord rec;
        rec.covariates = {eng.normal()};
        rec.event_time = 0.05 + eng.exponential(0.8);
        rec.censor_time = 0.05 + eng.exponential(0.4);
        full.push_back(rec);
        observed.add(rec.observed());
    }
    auto split = half_split(observed.size());
    for (auto method : {BaselineMethod::QR_Y, BaselineMethod::CQR_Y}) {
        auto lpb = make_baseline_lpb(observed, method, 0.1, split);
        std::size_t cover_t = 0, cover_y = 0;
        for (const auto& rec : full) {
            const double bound = lpb.lower_bound(rec.covariates);
            if (rec.event_time >= bound) ++cover_t;
            if (std::min(rec.event_time, rec.censor_time) >= bound) ++cover_y;
        }
        CHECK(cover_t >= cover_y);
    }
}
