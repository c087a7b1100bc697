#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "temporafed/retrieval.hpp"
#include "temporafed/temporal.hpp"
#include "temporafed/verticals.hpp"

namespace temporafed {

// Feature layout of the log-linear ranker: retrieval scores, corpus temporal
// feedback, external temporal mixture, then the post metadata.
enum Feature : std::size_t {
    kLmDirichlet = 0,
    kBm25,
    kIdf,
    kCorpusTemporal,
    kExternalTemporal,
    kDocLength,
    kUrlCount,
    kHashtagCount,
    kMentionCount,
    kHasUrl,
    kHasHashtags,
    kHasMentions,
    kIsReply,
    kStatusesCount,
    kFollowersCount,
    kFeatureCount
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "lm_dirichlet", "bm25",    "idf",         "corpus_temporal", "external_temporal",
    "doclen",       "n_urls",  "n_hashtags",  "n_mentions",      "has_url",
    "has_hashtags", "has_mentions", "is_reply", "n_statuses",    "n_followers",
};

using FeatureVector = std::vector<double>;

struct FeatureContext {
    const Index* index = nullptr;
    const QueryModel* query = nullptr;                // final (possibly expanded) query model
    const TemporalDensity* corpus_density = nullptr;  // nullptr: feature floored
    const VerticalSelection* selection = nullptr;     // nullptr: feature floored
    double mu = 2500.0;
    double k1 = 1.2;
    double b = 0.75;
};

/// Per-query ranges used to min-max normalize BM25 and IDF before the log.
struct ScoreRanges {
    double bm25_min = 0.0;
    double bm25_max = 0.0;
    double idf_min = 0.0;
    double idf_max = 0.0;
};

ScoreRanges score_ranges(const FeatureContext& context, std::span<const InternalId> candidates);

/// Feature vector of one main-corpus document.
FeatureVector extract_features(InternalId doc, const FeatureContext& context, const ScoreRanges& ranges);

/// Feature vectors for a candidate list (ranges taken over the list). An
/// absent density is recorded as a warning in diagnostics.
std::vector<FeatureVector> extract_features(const ScoredList& candidates, const FeatureContext& context,
                                            Diagnostics* diagnostics = nullptr);

struct LTRModel {
    double intercept = 0.0;
    std::vector<double> weights;
    std::vector<double> map_trace;  // training MAP after initialization and each cycle
    std::string config_hash;
};

/// Z + <weights, features>. Throws on arity mismatch.
double score_loglinear(const LTRModel& model, std::span<const double> features);

/// Orders candidates by score_loglinear, ties by doc_id.
ScoredList rerank(const LTRModel& model, const ScoredList& candidates, const std::vector<FeatureVector>& features);

struct TrainingQuery {
    std::string query_id;
    std::vector<std::string> doc_ids;
    std::vector<FeatureVector> features;
    std::vector<int> labels;           // graded, >= 1 relevant
    std::size_t relevant_total = 0;    // judged relevant, retrieved or not
};

struct TrainingSet {
    std::vector<TrainingQuery> queries;
};

struct CoordinateAscentConfig {
    std::size_t restarts = 3;
    std::size_t max_iters = 25;
    double tolerance = 1e-5;
    std::uint64_t seed = 42;
    /// Starting point of the first restart; uniform 1/d when absent. Later
    /// restarts draw weights uniformly from [-1, 1].
    std::optional<std::vector<double>> init;
};

/// Mean over queries with relevant_total > 0 of average precision under the
/// ordering induced by `weights`.
double training_map(const TrainingSet& training, std::span<const double> weights);

/// Cyclic coordinate ascent on training MAP with a fixed probe grid per
/// weight; best of `restarts` starting points.
LTRModel train_coordinate_ascent(const TrainingSet& training, const CoordinateAscentConfig& config);

/// `feature_name<TAB>weight` lines after a `# temporafed-ltr config=<hash>`
/// header and an `intercept` line.
std::string write_model(const LTRModel& model, std::span<const std::string_view> names = kFeatureNames);
LTRModel read_model(const std::string& text, const std::string& source_name,
                    std::span<const std::string_view> names = kFeatureNames);

/// CSV `iteration,MAP`.
std::string write_training_log(const LTRModel& model);

}  // namespace temporafed
