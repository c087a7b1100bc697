#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "support.hpp"
#include "temporafed/feedback.hpp"
#include "temporafed/random.hpp"
#include "temporafed/verticals.hpp"

using namespace temporafed;
using doctest::Approx;

namespace {

std::vector<Document> two_topics(std::size_t per_topic) {
    const std::vector<std::string> sport = {"goal", "match", "striker", "league", "keeper", "derby"};
    const std::vector<std::string> music = {"album", "guitar", "concert", "chorus", "tour", "vinyl"};
    Rng rng(3);
    std::vector<Document> docs;
    for (std::size_t i = 0; i < 2 * per_topic; ++i) {
        const auto& words = i % 2 == 0 ? sport : music;
        std::string text;
        for (int w = 0; w < 4; ++w) text += words[rng.index(words.size())] + " ";
        docs.push_back(support::doc((i % 2 == 0 ? "s" : "m") + std::to_string(i), static_cast<Timestamp>(i), text));
    }
    return docs;
}

Vertical vertical(std::uint32_t id, const std::vector<Document>& docs) { return {id, Index::build(docs), ""}; }

}  // namespace

TEST_SUITE("verticals") {

TEST_CASE("tf-idf vectors are unit length") {
    const Index index = Index::build(support::docs({"a b b", "b c", "a a a d"}));
    for (const auto& v : tfidf_vectors(index)) {
        double norm = 0.0;
        for (const auto& [term, w] : v.entries) norm += w * w;
        CHECK(norm == Approx(1.0));
    }
}

TEST_CASE("disjoint topics separate perfectly") {
    const auto docs = two_topics(40);
    ClusteringParams params;
    params.k = 2;
    params.batch_size = 16;
    params.iterations = 30;
    const auto assignment = cluster_verticals(docs, params);
    REQUIRE(assignment.labels.size() == docs.size());
    std::map<std::uint32_t, std::set<char>> topics_per_cluster;
    for (std::size_t i = 0; i < docs.size(); ++i) topics_per_cluster[assignment.labels[i]].insert(docs[i].doc_id[0]);
    CHECK(topics_per_cluster.size() == 2);
    for (const auto& [cluster, topics] : topics_per_cluster) CHECK(topics.size() == 1);
}

TEST_CASE("clustering edge cases and determinism") {
    const auto docs = support::docs({"red apple", "green pear", "blue sky", "yellow sun", "black cat"});
    ClusteringParams one;
    one.k = 1;
    for (auto label : cluster_verticals(docs, one).labels) CHECK(label == 0);

    ClusteringParams all;
    all.k = docs.size();
    const auto singletons = cluster_verticals(docs, all);
    CHECK(std::set<std::uint32_t>(singletons.labels.begin(), singletons.labels.end()).size() == docs.size());

    ClusteringParams too_many;
    too_many.k = docs.size() + 1;
    CHECK_THROWS_AS(cluster_verticals(docs, too_many), Error);

    const auto many = two_topics(30);
    ClusteringParams params;
    params.k = 4;
    params.seed = 99;
    CHECK(cluster_verticals(many, params).labels == cluster_verticals(many, params).labels);
}

TEST_CASE("verticals partition the documents and survive a save") {
    const auto docs = two_topics(10);
    ClusteringParams params;
    params.k = 2;
    const auto verticals = build_verticals(docs, cluster_verticals(docs, params));
    std::size_t total = 0;
    for (const auto& v : verticals) total += v.index.doc_count();
    CHECK(total == docs.size());

    const auto dir = std::filesystem::temp_directory_path() / "temporafed_verticals_roundtrip";
    std::filesystem::remove_all(dir);
    save_verticals(dir.string(), verticals);
    CHECK(std::filesystem::exists(dir / "assignment.csv"));
    const auto loaded = load_verticals(dir.string());
    REQUIRE(loaded.size() == verticals.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].id == verticals[i].id);
        CHECK(loaded[i].label == verticals[i].label);
        CHECK(loaded[i].index.documents() == verticals[i].index.documents());
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("pre-selection puts overlapping verticals first") {
    std::vector<Vertical> verticals;
    verticals.push_back(vertical(0, support::docs({"x y z", "x x"})));
    verticals.push_back(vertical(1, support::docs({"filler words only", "more filler"})));
    verticals.push_back(vertical(2, support::docs({"apple pie", "apple tart crumble", "pie"})));
    verticals.push_back(vertical(3, support::docs({"apple"})));
    const auto kept = preselect_verticals(verticals, query_counts({"apple"}), 3, 2500.0);
    REQUIRE(kept.size() == 3);
    CHECK(std::find(kept.begin(), kept.begin() + 2, 2) != kept.begin() + 2);
    CHECK(std::find(kept.begin(), kept.begin() + 2, 3) != kept.begin() + 2);
}

TEST_CASE("collection weights match direct counting") {
    std::vector<Vertical> verticals;
    verticals.push_back(vertical(0, support::docs({"apple pie", "apple", "apple crumble pie", "pear"})));
    verticals.push_back(vertical(1, support::docs({"apple juice", "apple apple", "orange"})));
    verticals.push_back(vertical(2, support::docs({"pie contest", "apple pie apple pie", "tart"})));
    const QueryModel q = query_counts({"apple", "pie"});
    SelectionParams params;
    params.k_merge = 4;
    params.n_fb = 2;
    params.mu = 5.0;
    const auto selection = select_verticals(verticals, q, params, kNoTimeLimit, "q1");

    // merge by hand
    std::vector<std::pair<double, std::uint32_t>> merged;
    for (const auto& v : verticals) {
        ScorerParams scorer;
        scorer.mu = 5.0;
        for (const auto& e : search(v.index, q, scorer, 4).entries) merged.emplace_back(e.score, v.id);
    }
    std::stable_sort(merged.begin(), merged.end(), [](auto& a, auto& b) { return a.first > b.first; });
    merged.resize(4);
    std::map<std::uint32_t, double> counts;
    for (const auto& m : merged) counts[m.second] += 1.0;

    double total = 0.0;
    CHECK(selection.merged_total == 4);
    for (const auto& s : selection.selected) {
        CHECK(s.weight == counts[s.vertical_id] / 4.0);
        CHECK(s.merged_count == counts[s.vertical_id]);
        CHECK(s.feedback.entries.size() <= 2);
        total += s.weight;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(selection.selected.size() == counts.size());
}

TEST_CASE("single vertical gets the whole weight; empty selection is an error") {
    std::vector<Vertical> verticals;
    verticals.push_back(vertical(0, support::docs({"apple pie", "apple"})));
    verticals.push_back(vertical(1, support::docs({"orange", "banana"})));
    SelectionParams params;
    const auto selection = select_verticals(verticals, query_counts({"apple"}), params);
    REQUIRE(selection.selected.size() == 1);
    CHECK(selection.selected[0].weight == 1.0);
    CHECK_THROWS_AS(select_verticals(verticals, query_counts({"kiwi"}), params), EmptySelectionError);
    params.k_merge = 2;
    CHECK_THROWS_AS(select_verticals(verticals, query_counts({"apple"}), params), Error);
}

TEST_CASE("vertical feedback density follows its matches") {
    const Timestamp day = 86400;
    std::vector<Document> docs;
    Rng rng(5);
    for (int i = 0; i < 30; ++i) {
        docs.push_back(support::doc("b" + std::to_string(i), 20 * day + rng.integer(0, day - 1), "storm flood warning"));
    }
    for (int i = 0; i < 30; ++i) {
        docs.push_back(support::doc("o" + std::to_string(i), rng.integer(0, 60 * day), "sunny weekend"));
    }
    const Vertical v = vertical(0, docs);
    const auto fb = vertical_temporal_density(v, query_counts({"storm"}), 50, WeightScheme::rank);
    double inside = 0.0;
    const double step = 600.0;
    for (double t = 19.0 * day; t <= 22.0 * day; t += step) inside += fb.density(t) * step;
    CHECK(inside > 0.9);

    const auto one = vertical_temporal_density(v, query_counts({"storm"}), 1, WeightScheme::rank);
    CHECK(one.density.size() == 1);
    const double center = static_cast<double>(v.index.document(one.documents.entries[0].internal).timestamp);
    CHECK(one.density(center) > one.density(center + 1000.0));
    CHECK_THROWS_AS(vertical_temporal_density(v, query_counts({"absent"}), 5, WeightScheme::rank), DegenerateSampleError);
}

TEST_CASE("rank and score weights agree on equal scores") {
    const Vertical v = vertical(0, support::docs({"x", "x", "x"}, 0, 7200));
    const auto a = vertical_temporal_density(v, query_counts({"x"}), 3, WeightScheme::score);
    const auto b = vertical_temporal_density(v, query_counts({"x"}), 3, WeightScheme::rank);
    // equal scores: score weights uniform, rank weights decay, so compare against the uniform fit
    const std::vector<double> ts = {0.0, 7200.0, 14400.0};
    const std::vector<double> ones = {1.0, 1.0, 1.0};
    const auto uniform = kde_fit(ts, ones);
    for (double t = -3600; t < 20000; t += 900) CHECK(a.density(t) == Approx(uniform(t)));
    CHECK(b.density.size() == 3);
}

TEST_CASE("external mixture is the weighted sum of vertical densities") {
    const std::vector<double> t1 = {0.0, 3600.0};
    const std::vector<double> t2 = {10000.0};
    const std::vector<double> t3 = {5000.0, 6000.0, 9000.0};
    const std::vector<double> w1 = {1.0, 3.0};
    const std::vector<double> w2 = {1.0};
    const std::vector<double> w3 = {1.0, 1.0, 2.0};
    VerticalSelection selection;
    selection.selected.resize(3);
    selection.selected[0].weight = 0.5;
    selection.selected[0].density = TemporalDensity(t1, w1, 1800.0);
    selection.selected[1].weight = 0.2;
    selection.selected[1].density = TemporalDensity(t2, w2, 3600.0);
    selection.selected[2].weight = 0.3;
    selection.selected[2].density = TemporalDensity(t3, w3, 900.0);

    auto gauss = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
    for (double t : {-2000.0, 0.0, 2500.0, 5500.0, 9000.0, 12000.0}) {
        const double f1 = (0.5 * gauss(t / 1800.0) + 1.5 * gauss((t - 3600.0) / 1800.0)) / (2 * 1800.0);
        const double f2 = gauss((t - 10000.0) / 3600.0) / 3600.0;
        const double f3 = (0.75 * gauss((t - 5000.0) / 900.0) + 0.75 * gauss((t - 6000.0) / 900.0) +
                           1.5 * gauss((t - 9000.0) / 900.0)) /
                          (3 * 900.0);
        CHECK(external_temporal_relevance(selection, t) == Approx(0.5 * f1 + 0.2 * f2 + 0.3 * f3).epsilon(1e-12));
    }

    VerticalSelection twin;
    twin.selected.resize(2);
    for (auto& s : twin.selected) {
        s.weight = 0.5;
        s.density = TemporalDensity(t1, w1, 1800.0);
    }
    for (double t : {0.0, 1000.0, 4000.0}) {
        CHECK(external_temporal_relevance(twin, t) == Approx((*twin.selected[0].density)(t)).epsilon(1e-14));
    }
}

}  // TEST_SUITE
