#include <doctest.h>

#include <filesystem>
#include <set>

#include "temporafed/synthbench.hpp"

using namespace temporafed;

namespace {

SynthConfig small_config() {
    SynthConfig c;
    c.n_queries = 4;
    c.n_train_queries = 2;
    c.main_docs = 3000;
    c.external_docs = 1200;
    c.vocabulary = 800;
    c.external_topics = 8;
    c.external_per_topic = 30;
    c.span_days = 30.0;
    return c;
}

bool inside_window(const SynthCorpus& corpus, const std::string& query_id, Timestamp t) {
    for (const auto& b : corpus.bursts) {
        if (b.query_id == query_id && t >= b.begin && t < b.end) return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("synthbench") {

TEST_CASE("synthetic words are distinct") {
    std::set<std::string> words;
    for (std::size_t i = 0; i < 20000; ++i) words.insert(synth_word(i));
    CHECK(words.size() == 20000);
}

TEST_CASE("generation is deterministic for a seed") {
    const auto a = generate(small_config());
    const auto b = generate(small_config());
    CHECK(a.main == b.main);
    CHECK(a.external == b.external);
    CHECK(a.qrels.judgments() == b.qrels.judgments());
    auto other = small_config();
    other.seed = 7;
    CHECK_FALSE(generate(other).main == a.main);
}

TEST_CASE("sizes, topics and judgments") {
    const auto config = small_config();
    const auto corpus = generate(config);
    CHECK(corpus.main.size() == config.main_docs);
    CHECK(corpus.external.size() == config.external_docs);
    CHECK(corpus.topics.size() == config.n_queries);
    CHECK(corpus.train_topics.size() == config.n_train_queries);
    std::set<std::string> ids;
    for (const auto& d : corpus.main) ids.insert(d.doc_id);
    CHECK(ids.size() == corpus.main.size());
    for (std::size_t i = 1; i < corpus.main.size(); ++i) CHECK(corpus.main[i - 1].timestamp <= corpus.main[i].timestamp);
    for (const auto* set : {&corpus.topics, &corpus.train_topics}) {
        for (const auto& t : *set) {
            const auto r = corpus.qrels.relevant_count(t.query_id);
            CHECK(r >= config.min_relevant);
            CHECK(r <= config.max_relevant);
            for (const auto& d : corpus.qrels.relevant_docs(t.query_id)) CHECK(ids.count(d) == 1);
            CHECK_FALSE(corpus.burst_terms.at(t.query_id).empty());
        }
    }
}

TEST_CASE("full concentration puts every relevant post inside a window") {
    auto config = small_config();
    config.concentration = 1.0;
    const auto corpus = generate(config);
    std::map<std::string, Timestamp> times;
    for (const auto& d : corpus.main) times[d.doc_id] = d.timestamp;
    for (const auto& t : corpus.topics) {
        for (const auto& d : corpus.qrels.relevant_docs(t.query_id)) CHECK(inside_window(corpus, t.query_id, times[d]));
    }
}

TEST_CASE("external collection shares the topic vocabulary") {
    const auto corpus = generate(small_config());
    std::set<std::string> external_words;
    for (const auto& d : corpus.external) external_words.insert(d.tokens.begin(), d.tokens.end());
    for (const auto& t : corpus.topics) {
        std::size_t shared = 0;
        for (const auto& w : corpus.burst_terms.at(t.query_id)) shared += external_words.count(w);
        CHECK(shared > 0);
    }
}

TEST_CASE("infeasible configurations are rejected") {
    auto wide = small_config();
    wide.burst_days = 40.0;
    CHECK_THROWS_AS(generate(wide), Error);
    auto tiny = small_config();
    tiny.main_docs = 50;
    CHECK_THROWS_AS(generate(tiny), Error);
    auto no_concentration = small_config();
    no_concentration.concentration = 0.0;
    CHECK_THROWS_AS(validate(no_concentration), Error);
    auto few_external = small_config();
    few_external.external_docs = 10;
    CHECK_THROWS_AS(validate(few_external), Error);
}

TEST_CASE("written benchmark files") {
    const auto dir = std::filesystem::temp_directory_path() / "temporafed_synth_files";
    std::filesystem::remove_all(dir);
    write_synth(generate(small_config()), dir.string());
    for (const char* name : {"main.jsonl", "external.jsonl", "topics.tsv", "train_topics.tsv", "qrels.txt", "bursts.tsv"}) {
        CHECK(std::filesystem::file_size(dir / name) > 0);
    }
    const auto topics = read_topics_file((dir / "topics.tsv").string());
    CHECK(topics.size() == 4);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
