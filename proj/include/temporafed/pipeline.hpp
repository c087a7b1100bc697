#pragma once

#include <optional>
#include <string>
#include <vector>

#include "temporafed/config.hpp"
#include "temporafed/eval.hpp"
#include "temporafed/feedback.hpp"
#include "temporafed/ltr.hpp"
#include "temporafed/verticals.hpp"

namespace temporafed {

bool uses_verticals(Method method);
bool uses_model(Method method);

struct Collections {
    Index main;
    std::vector<Vertical> verticals;  // empty when no method needs them
};

/// Clusters the external documents into config.clusters verticals.
std::vector<Vertical> build_external_verticals(const std::vector<Document>& external, const ExperimentConfig& config);

/// Everything computed for one topic up to the final ordering.
struct QueryState {
    Topic topic;
    QueryModel query;                           // model used for candidate retrieval
    ScoredList candidates;                      // top `depth` by config.scorer (recency: by the prior-weighted score)
    std::optional<VerticalSelection> selection;
    std::optional<ExpandedQuery> expansion;
    std::optional<TemporalDensity> corpus_density;
};

QueryState prepare_query(const Collections& collections, const Topic& topic, const ExperimentConfig& config,
                         Diagnostics* diagnostics = nullptr);

/// Feature vectors of the candidates, with the densities the method provides.
std::vector<FeatureVector> query_features(const Collections& collections, const QueryState& state,
                                          const ExperimentConfig& config, Diagnostics* diagnostics = nullptr);

/// Final ordering truncated to config.k. `model` is required for ltr and full.
ScoredList rank_query(const Collections& collections, const QueryState& state, const ExperimentConfig& config,
                      const LTRModel* model, Diagnostics* diagnostics = nullptr);

/// Runs every topic (in parallel, results in topic order).
RunFile run_topics(const Collections& collections, const std::vector<Topic>& topics, const ExperimentConfig& config,
                   const LTRModel* model, Diagnostics* diagnostics = nullptr, std::vector<QueryState>* states = nullptr);

TrainingSet build_training_set(const Collections& collections, const std::vector<Topic>& topics, const Qrels& qrels,
                               const ExperimentConfig& config, Diagnostics* diagnostics = nullptr);

/// Coordinate ascent from the LM.Dir-only weighting, seeded from the root seed.
LTRModel train_model(const Collections& collections, const std::vector<Topic>& topics, const Qrels& qrels,
                     const ExperimentConfig& config, Diagnostics* diagnostics = nullptr);

}  // namespace temporafed
