#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "temporafed/random.hpp"
#include "temporafed/temporal.hpp"

using namespace temporafed;
using doctest::Approx;

namespace {

double trapezoid(const TemporalDensity& f, double lo, double hi, std::size_t steps) {
    const double dx = (hi - lo) / static_cast<double>(steps);
    double sum = 0.5 * (f(lo) + f(hi));
    for (std::size_t i = 1; i < steps; ++i) sum += f(lo + static_cast<double>(i) * dx);
    return sum * dx;
}

ScoredList list_with_scores(const std::vector<double>& scores) {
    ScoredList list;
    for (std::size_t i = 0; i < scores.size(); ++i) list.entries.push_back({"d" + std::to_string(i), scores[i], 0});
    return list;
}

}  // namespace

TEST_SUITE("temporal") {

TEST_CASE("Silverman bandwidth by formula") {
    // 16 pairs at +-1: sample sd sqrt(32/31), and 32^(1/5) = 2
    std::vector<double> ts;
    for (int i = 0; i < 16; ++i) {
        ts.push_back(-1.0);
        ts.push_back(1.0);
    }
    const double sd = std::sqrt(32.0 / 31.0);
    CHECK(silverman_bandwidth(ts) == Approx(1.06 * sd / 2.0).epsilon(1e-14));
    for (auto& t : ts) t *= 2.0;
    CHECK(silverman_bandwidth(ts) == Approx(1.06 * 2.0 * sd / 2.0).epsilon(1e-14));
}

TEST_CASE("Silverman bandwidth rejects degenerate samples") {
    const std::vector<double> one = {5.0};
    const std::vector<double> same = {3.0, 3.0, 3.0};
    CHECK_THROWS_AS(silverman_bandwidth(one), DegenerateSampleError);
    CHECK_THROWS_AS(silverman_bandwidth(same), DegenerateSampleError);
    CHECK(fallback_bandwidth(kSecondsPerDay) == 3600.0);
    CHECK(fallback_bandwidth(30 * kSecondsPerDay) == Approx(25920.0));
}

TEST_CASE("Gaussian kernel values") {
    const std::vector<double> one = {0.0};
    const std::vector<double> w1 = {1.0};
    const TemporalDensity single(one, w1, 1.0);
    CHECK(single(0.0) == Approx(0.3989422804014327).epsilon(1e-12));

    const std::vector<double> two = {-1.0, 1.0};
    const std::vector<double> w2 = {1.0, 1.0};
    const TemporalDensity pair(two, w2, 1.0);
    CHECK(pair(0.0) == Approx(0.24197072451914337).epsilon(1e-12));
}

TEST_CASE("weights are rescaled to the sample size") {
    const std::vector<double> ts = {0.0, 10.0, 25.0};
    const std::vector<double> w = {2.0, 1.0, 1.0};
    const std::vector<double> w_doubled = {4.0, 2.0, 2.0};
    const auto a = kde_fit(ts, w, 5.0);
    const auto b = kde_fit(ts, w_doubled, 5.0);
    CHECK(a.weights()[0] == Approx(1.5));
    double total = 0.0;
    for (double x : a.weights()) total += x;
    CHECK(total == Approx(3.0));
    for (double t = -20; t < 50; t += 3.5) CHECK(a(t) == b(t));
}

TEST_CASE("invalid weights") {
    const std::vector<double> ts = {0.0, 1.0};
    const std::vector<double> zero = {0.0, 0.0};
    const std::vector<double> negative = {1.0, -1.0};
    const std::vector<double> short_w = {1.0};
    CHECK_THROWS_AS(kde_fit(ts, zero, 1.0), Error);
    CHECK_THROWS_AS(kde_fit(ts, negative, 1.0), Error);
    CHECK_THROWS_AS(kde_fit(ts, short_w, 1.0), Error);
}

TEST_CASE("degenerate samples fall back to the fixed bandwidth") {
    const std::vector<double> ts = {100.0, 100.0};
    const std::vector<double> w = {1.0, 1.0};
    CHECK(kde_fit(ts, w).bandwidth() == 3600.0);
}

TEST_CASE("density integrates to one and vanishes far away") {
    Rng rng(7);
    for (std::size_t n : {5u, 50u, 500u}) {
        std::vector<double> ts, ws;
        for (std::size_t i = 0; i < n; ++i) {
            ts.push_back(rng.uniform(0.0, 30 * kSecondsPerDay));
            ws.push_back(rng.uniform(0.01, 1.0));
        }
        const auto f = kde_fit(ts, ws);
        const double h = f.bandwidth();
        CHECK(trapezoid(f, f.min_timestamp() - 8 * h, f.max_timestamp() + 8 * h, 200000) == Approx(1.0).epsilon(1e-3));
        CHECK(f(f.max_timestamp() + 100 * h) < 1e-12);
        CHECK(f(f.min_timestamp() - 100 * h) >= 0.0);
    }
}

TEST_CASE("shift equivariance") {
    const std::vector<double> ts = {0.0, 3600.0, 9000.0, 20000.0};
    const std::vector<double> ws = {1.0, 2.0, 0.5, 1.0};
    std::vector<double> shifted = ts;
    const double delta = 1.36e9;
    for (auto& t : shifted) t += delta;
    const auto a = kde_fit(ts, ws);
    const auto b = kde_fit(shifted, ws);
    CHECK(a.bandwidth() == Approx(b.bandwidth()).epsilon(1e-9));
    for (double t = -5000; t < 30000; t += 1234) CHECK(std::abs(a(t) - b(t + delta)) < 1e-12);
}

TEST_CASE("rank weights") {
    const auto w = feedback_weights(list_with_scores({-1.0, -2.0, -3.0, -4.0}), WeightScheme::rank);
    const auto expected = std::vector<double>{48.0 / 25.0, 24.0 / 25.0, 16.0 / 25.0, 12.0 / 25.0};
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == Approx(expected[i]).epsilon(1e-12));
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] <= w[i - 1]);

    // raw 1, 1/2, 1/4 for ranks 1, 2, 4 scale to 12/7, 6/7, 3/7
    const std::vector<double> raw = {1.0, 0.5, 0.25};
    const std::vector<double> ts = {0.0, 1.0, 2.0};
    const auto f = kde_fit(ts, raw, 1.0);
    CHECK(f.weights()[0] == Approx(12.0 / 7.0).epsilon(1e-12));
    CHECK(f.weights()[1] == Approx(6.0 / 7.0).epsilon(1e-12));
    CHECK(f.weights()[2] == Approx(3.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("score weights are a softmax over log scores") {
    const auto equal = feedback_weights(list_with_scores({-3.0, -3.0, -3.0}), WeightScheme::score);
    for (double x : equal) CHECK(x == Approx(1.0));
    const auto w = feedback_weights(list_with_scores({0.0, -std::log(2.0)}), WeightScheme::score);
    CHECK(w[0] == Approx(4.0 / 3.0));
    CHECK(w[1] == Approx(2.0 / 3.0));
    const auto single = feedback_weights(list_with_scores({-50.0}), WeightScheme::score);
    CHECK(single == std::vector<double>{1.0});
    const auto large = feedback_weights(list_with_scores({-1000.0, -1001.0}), WeightScheme::score);
    CHECK(std::isfinite(large[0]));
    CHECK(parse_weight_scheme("rank") == WeightScheme::rank);
    CHECK_THROWS_AS(parse_weight_scheme("uniform"), Error);
}

TEST_CASE("histograms") {
    const double day = kSecondsPerDay;
    const std::vector<double> one_bin = {10.0, 20.0, 30.0};
    const std::vector<double> ones = {1.0, 1.0, 1.0};
    CHECK(histogram(one_bin, ones, day, 0.0).masses == std::vector<double>{1.0});

    const std::vector<double> adjacent = {100.0, day + 100.0};
    const std::vector<double> pair = {1.0, 1.0};
    CHECK(histogram(adjacent, pair, day, 0.0).masses == std::vector<double>{0.5, 0.5});
    const std::vector<double> weighted = {3.0, 1.0};
    CHECK(histogram(adjacent, weighted, day, 0.0).masses == std::vector<double>{0.75, 0.25});
    // right edge belongs to the next bin
    const std::vector<double> edge = {day};
    const std::vector<double> w1 = {1.0};
    CHECK(histogram(edge, w1, day, 0.0).masses == std::vector<double>{0.0, 1.0});
    CHECK(histogram({}, {}, day, 0.0).empty());
    const std::vector<double> early = {-1.0};
    CHECK_THROWS_AS(histogram(early, w1, day, 0.0), Error);
}

TEST_CASE("earth mover's distance") {
    auto unit_at = [](std::size_t bin) {
        TimeHistogram h;
        h.masses.assign(bin + 1, 0.0);
        h.masses[bin] = 1.0;
        return h;
    };
    CHECK(emd_1d(unit_at(2), unit_at(2)) == 0.0);
    CHECK(emd_1d(unit_at(0), unit_at(1)) == Approx(1.0));
    CHECK(emd_1d(unit_at(0), unit_at(7)) == Approx(7.0));
    TimeHistogram a;
    a.masses = {0.5, 0.5};
    TimeHistogram b;
    b.masses = {0.0, 0.0, 1.0};
    CHECK(emd_1d(a, b) == Approx(1.5));
    TimeHistogram shifted = b;
    shifted.origin = 5.0;
    CHECK_THROWS_AS(emd_1d(a, shifted), Error);
}

}  // TEST_SUITE
