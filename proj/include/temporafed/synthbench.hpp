#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "temporafed/corpus.hpp"
#include "temporafed/eval.hpp"

namespace temporafed {

struct SynthConfig {
    std::uint64_t seed = 42;
    std::size_t n_queries = 20;        // evaluation topics
    std::size_t n_train_queries = 10;  // separate topics for ranker training
    std::size_t main_docs = 20000;
    std::size_t external_docs = 5000;
    std::size_t vocabulary = 5000;     // background words
    Timestamp start = 1359676800;      // 2013-02-01
    double span_days = 60.0;
    std::size_t min_bursts = 1;
    std::size_t max_bursts = 2;
    double burst_days = 2.0;           // window width
    double concentration = 0.8;        // share of relevant posts inside windows
    std::size_t min_relevant = 30;
    std::size_t max_relevant = 80;
    double noise_rate = 2.5;           // off-topic posts sharing query terms, per relevant post
    double retweet_rate = 0.05;        // background posts emitted as retweets
    std::size_t external_per_topic = 60;
    double external_concentration = 0.85;
    std::size_t external_topics = 40;  // background topics of the external collection
};

struct BurstWindow {
    std::string query_id;
    Timestamp begin = 0;
    Timestamp end = 0;  // exclusive
};

struct SynthCorpus {
    std::vector<Document> main;
    std::vector<Document> external;
    std::vector<Topic> topics;        // evaluation topics
    std::vector<Topic> train_topics;  // ranker training topics
    Qrels qrels;                      // judgments for both topic sets
    std::vector<BurstWindow> bursts;
    /// Per topic: the words that only appear in posts inside its windows.
    std::map<std::string, std::vector<std::string>> burst_terms;
};

/// Throws Error for configurations that cannot be realized (windows wider
/// than the span, too few documents for the planted topics, ...).
void validate(const SynthConfig& config);

SynthCorpus generate(const SynthConfig& config);

/// Writes main.jsonl, external.jsonl, topics.tsv, train_topics.tsv,
/// qrels.txt and bursts.tsv into `directory`.
void write_synth(const SynthCorpus& corpus, const std::string& directory);

/// The i-th synthetic word; distinct for distinct i < 343000.
std::string synth_word(std::size_t i);

}  // namespace temporafed
