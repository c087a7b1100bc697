#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "temporafed/feedback.hpp"
#include "temporafed/ltr.hpp"
#include "temporafed/random.hpp"

using namespace temporafed;
using doctest::Approx;

namespace {

// AP of the ordering by descending score; scores assumed distinct.
double ap_by_hand(const std::vector<double>& scores, const std::vector<int>& labels, std::size_t relevant_total) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double hits = 0.0, sum = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (labels[order[r]] >= 1) {
            hits += 1.0;
            sum += hits / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(relevant_total);
}

double map_by_hand(const TrainingSet& set, const std::vector<double>& w) {
    double total = 0.0;
    for (const auto& q : set.queries) {
        std::vector<double> scores;
        for (const auto& f : q.features) {
            double s = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
            scores.push_back(s);
        }
        total += ap_by_hand(scores, q.labels, q.relevant_total);
    }
    return total / static_cast<double>(set.queries.size());
}

// Two features: a weak signal and a noisy one, and a third that is informative only in combination.
TrainingSet synthetic_training(std::uint64_t seed, std::size_t queries, std::size_t docs) {
    Rng rng(seed);
    TrainingSet set;
    for (std::size_t q = 0; q < queries; ++q) {
        TrainingQuery tq;
        tq.query_id = "q" + std::to_string(q);
        for (std::size_t d = 0; d < docs; ++d) {
            const int label = rng.bernoulli(0.3) ? 1 : 0;
            tq.doc_ids.push_back("d" + std::to_string(1000 + d));
            tq.labels.push_back(label);
            const double signal = label + rng.normal();
            const double other = 0.7 * label + rng.normal();
            tq.features.push_back({signal, rng.normal(), other});
            tq.relevant_total += static_cast<std::size_t>(label);
        }
        tq.relevant_total += 1;  // one relevant document never retrieved
        set.queries.push_back(std::move(tq));
    }
    return set;
}

}  // namespace

TEST_SUITE("ltr") {

TEST_CASE("feature vector assembled by hand") {
    Metadata raw;
    raw.followers_count = 9;
    raw.statuses_count = 99;
    raw.is_reply = true;
    std::vector<Document> docs = {make_document("1", 86400, "storm warning #weather @met http://t.co/a", raw),
                                  make_document("2", 2 * 86400, "storm storm"), make_document("3", 0, "calm day")};
    const Index index = Index::build(docs);
    const QueryModel q = query_mle({"storm"});
    const std::vector<double> ts = {86400.0, 2 * 86400.0};
    const std::vector<double> ws = {1.0, 1.0};
    const TemporalDensity density(ts, ws, 3600.0);
    FeatureContext context;
    context.index = &index;
    context.query = &q;
    context.corpus_density = &density;

    ScoredList candidates = search(index, q, ScorerParams{}, 10);
    REQUIRE(candidates.entries.size() == 2);
    Diagnostics diag;
    const auto features = extract_features(candidates, context, &diag);
    CHECK(diag.warnings.size() == 1);

    const support::Counts counts(docs);
    const double bm25_1 = counts.bm25(0, q, 1.2, 0.75);
    const double bm25_2 = counts.bm25(1, q, 1.2, 0.75);
    const double lo = std::min(bm25_1, bm25_2), hi = std::max(bm25_1, bm25_2);
    for (std::size_t i = 0; i < 2; ++i) {
        const InternalId d = candidates.entries[i].internal;
        const auto& f = features[i];
        REQUIRE(f.size() == kFeatureCount);
        CHECK(f[kLmDirichlet] == Approx(counts.lm_dirichlet(d, q, 2500.0)).epsilon(1e-12));
        const double bm25 = counts.bm25(d, q, 1.2, 0.75);
        CHECK(f[kBm25] == Approx(std::log(std::max((bm25 - lo) / (hi - lo), kDensityFloor))).epsilon(1e-12));
        // both documents share the same idf sum: flat range maps to 1
        CHECK(f[kIdf] == 0.0);
        CHECK(f[kCorpusTemporal] == Approx(std::log(density(static_cast<double>(docs[d].timestamp)))).epsilon(1e-12));
        CHECK(f[kExternalTemporal] == Approx(std::log(kDensityFloor)));
    }
    const auto& first = features[candidates.entries[0].doc_id == "1" ? 0 : 1];
    CHECK(first[kDocLength] == Approx(std::log(4.0)));
    CHECK(first[kUrlCount] == Approx(std::log(2.0)));
    CHECK(first[kHashtagCount] == Approx(std::log(2.0)));
    CHECK(first[kMentionCount] == Approx(std::log(2.0)));
    CHECK(first[kHasUrl] == 1.0);
    CHECK(first[kHasHashtags] == 1.0);
    CHECK(first[kHasMentions] == 1.0);
    CHECK(first[kIsReply] == 1.0);
    CHECK(first[kStatusesCount] == Approx(std::log(100.0)));
    CHECK(first[kFollowersCount] == Approx(std::log(10.0)));
}

TEST_CASE("log-linear scoring and arity") {
    LTRModel model;
    model.intercept = 0.5;
    model.weights = {1.0, -2.0};
    const std::vector<double> f = {3.0, 1.0};
    CHECK(score_loglinear(model, f) == Approx(1.5));
    const std::vector<double> wrong = {1.0};
    CHECK_THROWS_AS(score_loglinear(model, wrong), Error);
}

TEST_CASE("a model using only the Dirichlet score keeps the baseline order") {
    const auto docs = support::docs({"a b", "a a c", "a", "b c a a a", "c"});
    const Index index = Index::build(docs);
    const QueryModel q = query_mle({"a"});
    const ScoredList baseline = search(index, q, ScorerParams{}, 10);
    FeatureContext context;
    context.index = &index;
    context.query = &q;
    const auto features = extract_features(baseline, context);
    LTRModel model;
    model.weights.assign(kFeatureCount, 0.0);
    model.weights[kLmDirichlet] = 1.0;
    const auto reranked = rerank(model, baseline, features);
    REQUIRE(reranked.entries.size() == baseline.entries.size());
    for (std::size_t i = 0; i < baseline.entries.size(); ++i) {
        CHECK(reranked.entries[i].doc_id == baseline.entries[i].doc_id);
    }
}

TEST_CASE("training MAP matches a hand computation") {
    const auto set = synthetic_training(11, 4, 30);
    for (const auto& w : std::vector<std::vector<double>>{{1, 0, 0}, {0.3, -0.2, 0.8}, {-1, 0.5, 0.1}}) {
        CHECK(training_map(set, w) == Approx(map_by_hand(set, w)).epsilon(1e-12));
    }
}

TEST_CASE("a perfectly separating feature reaches MAP one") {
    TrainingSet set;
    Rng rng(4);
    for (int q = 0; q < 3; ++q) {
        TrainingQuery tq;
        tq.query_id = "q" + std::to_string(q);
        for (int d = 0; d < 20; ++d) {
            const int label = d % 4 == 0;
            tq.doc_ids.push_back("d" + std::to_string(d));
            tq.labels.push_back(label);
            tq.features.push_back({rng.normal(), label ? 1.0 : 0.0});
            tq.relevant_total += label;
        }
        set.queries.push_back(tq);
    }
    CoordinateAscentConfig config;
    config.init = std::vector<double>{1.0, 0.0};
    const auto model = train_coordinate_ascent(set, config);
    CHECK(model.map_trace.back() == Approx(1.0));
    CHECK(training_map(set, model.weights) == Approx(1.0));
}

TEST_CASE("learned weights do no worse than the best single feature") {
    const auto set = synthetic_training(21, 8, 40);
    double best_single = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> w(3, 0.0);
            w[i] = sign;
            best_single = std::max(best_single, map_by_hand(set, w));
        }
    }
    CoordinateAscentConfig config;
    config.seed = 5;
    const auto model = train_coordinate_ascent(set, config);
    CHECK(model.map_trace.back() >= best_single - 1e-12);
    CHECK(model.map_trace.back() == Approx(map_by_hand(set, model.weights)).epsilon(1e-12));
    for (std::size_t i = 1; i < model.map_trace.size(); ++i) CHECK(model.map_trace[i] >= model.map_trace[i - 1]);
}

TEST_CASE("zero iterations returns the initial weights") {
    const auto set = synthetic_training(3, 2, 10);
    CoordinateAscentConfig config;
    config.max_iters = 0;
    config.restarts = 1;
    config.init = std::vector<double>{0.2, 0.4, -0.1};
    const auto model = train_coordinate_ascent(set, config);
    CHECK(model.weights == *config.init);
    REQUIRE(model.map_trace.size() == 1);
    CHECK(model.map_trace[0] == Approx(training_map(set, *config.init)));
}

TEST_CASE("training is deterministic for a seed") {
    const auto set = synthetic_training(8, 5, 25);
    CoordinateAscentConfig config;
    config.seed = 77;
    const auto a = train_coordinate_ascent(set, config);
    const auto b = train_coordinate_ascent(set, config);
    CHECK(a.weights == b.weights);
    CHECK(a.map_trace == b.map_trace);
}

TEST_CASE("training input errors") {
    TrainingSet empty;
    CHECK_THROWS_AS(train_coordinate_ascent(empty, {}), Error);
    auto set = synthetic_training(1, 1, 5);
    for (auto& l : set.queries[0].labels) l = 0;
    CHECK_THROWS_AS(train_coordinate_ascent(set, {}), Error);
    auto ok = synthetic_training(1, 1, 5);
    CoordinateAscentConfig none;
    none.restarts = 0;
    CHECK_THROWS_AS(train_coordinate_ascent(ok, none), Error);
}

TEST_CASE("model files round trip and reject bad input") {
    LTRModel model;
    model.intercept = 0.25;
    model.config_hash = "0123456789abcdef";
    for (std::size_t i = 0; i < kFeatureCount; ++i) model.weights.push_back(0.1 * static_cast<double>(i) - 0.3);
    model.weights[3] = 1.0 / 3.0;
    const std::string text = write_model(model);
    CHECK(text.rfind("# temporafed-ltr config=0123456789abcdef\n", 0) == 0);
    const LTRModel back = read_model(text, "model.txt");
    CHECK(back.weights == model.weights);
    CHECK(back.intercept == model.intercept);
    CHECK(back.config_hash == model.config_hash);

    CHECK_THROWS_AS(read_model("intercept\t0\n", "m"), ParseError);
    std::string unknown = text + "mystery\t1\n";
    CHECK_THROWS_AS(read_model(unknown, "m"), ParseError);
    std::string missing = text.substr(0, text.rfind("n_followers"));
    CHECK_THROWS_AS(read_model(missing, "m"), ParseError);
    std::string duplicate = text + "bm25\t2\n";
    CHECK_THROWS_AS(read_model(duplicate, "m"), ParseError);
    std::string bad = text;
    bad.replace(bad.find("bm25\t") + 5, 1, "x");
    CHECK_THROWS_AS(read_model(bad, "m"), ParseError);
}

TEST_CASE("training log") {
    LTRModel model;
    model.map_trace = {0.25, 0.5};
    CHECK(write_training_log(model) == "iteration,MAP\n0,0.250000\n1,0.500000\n");
}

}  // TEST_SUITE
