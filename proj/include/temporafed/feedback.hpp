#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "temporafed/retrieval.hpp"
#include "temporafed/temporal.hpp"
#include "temporafed/verticals.hpp"

namespace temporafed {

/// Weight with which one feedback document entered an estimate; the mass a
/// term receives from the document is weight * P(w|d) before normalization.
struct Contribution {
    std::uint32_t vertical_id = 0;
    std::string doc_id;
    double weight = 0.0;
};

struct RelevanceModel {
    std::map<std::string, double> terms;  // sums to one
    std::vector<Contribution> provenance;
};

struct ExpandedQuery {
    QueryModel original;  // maximum-likelihood c(w,q)/|q|
    RelevanceModel feedback;
    double lambda = 0.5;
    QueryModel final_model;  // lambda * original + (1 - lambda) * feedback
};

/// c(w,q) / |q|.
QueryModel query_mle(const std::vector<std::string>& terms);

/// Feedback model over external verticals. Each selected vertical
/// contributes its top n_fb documents (taken from the selection's feedback
/// lists) with weight P(q|c) / |R_c| * P(q|d); P(q|d) is the softmax of the
/// documents' query-likelihood scores within that feedback set. Keeps the
/// n_terms heaviest terms and renormalizes.
RelevanceModel relevance_model_external(const std::vector<Vertical>& verticals, const VerticalSelection& selection,
                                        std::size_t n_fb, std::size_t n_terms);

using TemporalRelevance = std::function<double(double)>;

/// As relevance_model_external, with every document additionally weighted by
/// max(P(t_d|q), kDensityFloor). Without an explicit `temporal`, P(t_d|q) is
/// external_temporal_relevance(selection, t_d).
RelevanceModel time_based_relevance_model(const std::vector<Vertical>& verticals, const VerticalSelection& selection,
                                          std::size_t n_fb, std::size_t n_terms,
                                          const TemporalRelevance& temporal = {});

/// Collection -> time period -> term generation. P(T|q) defaults to the
/// histogram of all feedback timestamps (epoch-aligned bins of `period`);
/// P(w|T,q,c) is the P(q|d)-weighted term distribution of the vertical's
/// feedback documents falling in T.
RelevanceModel discrete_time_relevance_model(const std::vector<Vertical>& verticals,
                                             const VerticalSelection& selection, double period, std::size_t n_fb,
                                             std::size_t n_terms, const TimeHistogram* period_prior = nullptr);

ExpandedQuery interpolate_query(const QueryModel& original, const RelevanceModel& feedback, double lambda);

struct CorpusTemporalFeedback {
    ScoredList documents;
    TemporalDensity density;
};

/// Density of the top n_fb main-corpus documents retrieved with the final
/// query model.
CorpusTemporalFeedback corpus_temporal_feedback(const Index& index, const QueryModel& query, std::size_t n_fb,
                                                WeightScheme scheme, Timestamp query_time, double mu = 2500.0,
                                                double period = kSecondsPerDay);

inline CorpusTemporalFeedback corpus_temporal_feedback(const Index& index, const ExpandedQuery& expanded,
                                                       std::size_t n_fb, WeightScheme scheme, Timestamp query_time,
                                                       double mu = 2500.0, double period = kSecondsPerDay) {
    return corpus_temporal_feedback(index, expanded.final_model, n_fb, scheme, query_time, mu, period);
}

}  // namespace temporafed
