#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "temporafed/retrieval.hpp"
#include "temporafed/temporal.hpp"

namespace temporafed {

// --- clustering -------------------------------------------------------------

/// Sparse vector sorted by term id.
struct SparseVector {
    std::vector<std::pair<TermId, double>> entries;
};

/// ltc weighting: (1 + log tf) * log(N / df), cosine-normalized. Documents
/// whose every term occurs in all documents map to the zero vector.
std::vector<SparseVector> tfidf_vectors(const Index& index);

struct ClusteringParams {
    std::size_t k = 200;
    std::uint64_t seed = 42;
    std::size_t batch_size = 256;
    std::size_t iterations = 100;
};

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<std::uint32_t> labels;     // one per document, in input order
    std::vector<std::string> label_terms;  // highest-weight centroid term per cluster
};

/// Mini-batch k-means (k-means++ seeding) over tfidf_vectors. Clusters left
/// empty are re-seeded from the point farthest from its centroid.
ClusterAssignment cluster_verticals(const std::vector<Document>& documents, const ClusteringParams& params);

// --- verticals --------------------------------------------------------------

struct Vertical {
    std::uint32_t id = 0;
    Index index;
    std::string label;
};

std::vector<Vertical> build_verticals(const std::vector<Document>& documents, const ClusterAssignment& assignment);

/// Writes `<dir>/assignment.csv` (doc_id,vertical_id) and one index
/// artifact per vertical under `<dir>/verticals/<id>/`.
void save_verticals(const std::string& directory, const std::vector<Vertical>& verticals);
std::vector<Vertical> load_verticals(const std::string& directory);

struct SelectionParams {
    std::size_t v_sel = 3;
    std::size_t k_merge = 50;
    std::size_t n_fb = 50;
    double mu = 2500.0;
    WeightScheme scheme = WeightScheme::rank;
    double period = kSecondsPerDay;
};

struct SelectedVertical {
    std::uint32_t vertical_id = 0;
    std::size_t position = 0;     // index into the vertical sequence
    double weight = 0.0;          // P(q|c) = |M_c| / |M_k|
    std::size_t merged_count = 0; // |M_c|
    ScoredList feedback;          // top n_fb documents of this vertical
    std::optional<TemporalDensity> density;
};

struct VerticalSelection {
    std::string query_id;
    std::size_t merged_total = 0;  // |M_k|
    std::vector<SelectedVertical> selected;
};

/// Stage one: verticals ordered by query likelihood under their
/// Dirichlet-smoothed collection model; verticals sharing a query term rank
/// ahead of those that share none. Returns the top v_sel positions.
std::vector<std::size_t> preselect_verticals(const std::vector<Vertical>& verticals, const QueryModel& query,
                                             std::size_t v_sel, double mu);

/// Two-stage selection, collection weights from the merged top-k_merge list,
/// and a feedback density per kept vertical. Throws EmptySelectionError when
/// no vertical returns a document.
VerticalSelection select_verticals(const std::vector<Vertical>& verticals, const QueryModel& query,
                                   const SelectionParams& params, Timestamp query_time = kNoTimeLimit,
                                   std::string query_id = {});

struct VerticalFeedback {
    ScoredList documents;
    TemporalDensity density;
};

/// Top n_fb documents of one vertical and their weighted KDE.
VerticalFeedback vertical_temporal_density(const Vertical& vertical, const QueryModel& query, std::size_t n_fb,
                                           WeightScheme scheme, double mu = 2500.0,
                                           Timestamp query_time = kNoTimeLimit, double period = kSecondsPerDay);

/// Sum over selected verticals of f_c(t) * P(q|c).
double external_temporal_relevance(const VerticalSelection& selection, double t);

}  // namespace temporafed
