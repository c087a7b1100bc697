#include <algorithm>
#include <cmath>

#include "temporafed/retrieval.hpp"

namespace temporafed {

namespace {

struct ResolvedTerm {
    TermId id;
    double weight;
};

/// Query terms known to the index, in QueryModel (lexicographic) order.
std::vector<ResolvedTerm> resolve(const Index& index, const QueryModel& query, Diagnostics* diagnostics) {
    std::vector<ResolvedTerm> terms;
    terms.reserve(query.size());
    for (const auto& [term, weight] : query) {
        if (weight == 0.0) continue;
        auto id = index.term_id(term);
        if (!id || index.cf(*id) == 0) {
            if (diagnostics) ++diagnostics->skipped_query_terms;
            continue;
        }
        terms.push_back({*id, weight});
    }
    return terms;
}

// Per-document kernels. `tfs[i]` is the frequency of terms[i] in the document;
// search() and the single-document scorers share them so both paths produce
// bit-identical scores.

double lm_dirichlet_kernel(const Index& index, std::span<const ResolvedTerm> terms, std::span<const std::uint32_t> tfs,
                           InternalId doc, double mu) {
    const double collection = static_cast<double>(index.total_terms());
    const double denominator = static_cast<double>(index.doc_length(doc)) + mu;
    double score = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double background = static_cast<double>(index.cf(terms[i].id)) / collection;
        score += terms[i].weight * std::log((static_cast<double>(tfs[i]) + mu * background) / denominator);
    }
    return score;
}

double bm25_kernel(const Index& index, std::span<const ResolvedTerm> terms, std::span<const std::uint32_t> tfs,
                   InternalId doc, double k1, double b) {
    const double n = static_cast<double>(index.doc_count());
    const double norm = 1.0 - b + b * static_cast<double>(index.doc_length(doc)) / index.avg_doc_length();
    double score = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (tfs[i] == 0) continue;
        const double df = index.df(terms[i].id);
        const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        const double tf = tfs[i];
        score += terms[i].weight * idf * tf * (k1 + 1.0) / (tf + k1 * norm);
    }
    return score;
}

double idf_kernel(const Index& index, std::span<const ResolvedTerm> terms, std::span<const std::uint32_t> tfs) {
    const double n = static_cast<double>(index.doc_count());
    double score = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (tfs[i] == 0) continue;
        score += terms[i].weight * std::log(n / static_cast<double>(index.df(terms[i].id)));
    }
    return score;
}

std::vector<std::uint32_t> lookup_tfs(const Index& index, std::span<const ResolvedTerm> terms, InternalId doc) {
    std::vector<std::uint32_t> tfs(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) tfs[i] = index.tf(terms[i].id, doc);
    return tfs;
}

double score_with(const Index& index, std::span<const ResolvedTerm> terms, std::span<const std::uint32_t> tfs,
                  InternalId doc, const ScorerParams& scorer, Timestamp query_time) {
    switch (scorer.kind) {
        case ScorerKind::lm_dirichlet:
            return lm_dirichlet_kernel(index, terms, tfs, doc, scorer.mu);
        case ScorerKind::bm25:
            return bm25_kernel(index, terms, tfs, doc, scorer.k1, scorer.b);
        case ScorerKind::idf:
            return idf_kernel(index, terms, tfs);
        case ScorerKind::recency: {
            const double prior = recency_prior(query_time, index.document(doc).timestamp, scorer.recency_rate);
            return lm_dirichlet_kernel(index, terms, tfs, doc, scorer.mu) + std::log(prior);
        }
    }
    return 0.0;
}

}  // namespace

ScorerKind parse_scorer(std::string_view name) {
    if (name == "lmdir" || name == "lm_dirichlet") return ScorerKind::lm_dirichlet;
    if (name == "bm25") return ScorerKind::bm25;
    if (name == "idf") return ScorerKind::idf;
    if (name == "recency") return ScorerKind::recency;
    throw Error("unknown scorer '" + std::string(name) + "'");
}

double score_lm_dirichlet(const Index& index, const QueryModel& query, InternalId doc, double mu,
                          Diagnostics* diagnostics) {
    if (!(mu > 0.0)) throw Error("Dirichlet mu must be positive");
    auto terms = resolve(index, query, diagnostics);
    auto tfs = lookup_tfs(index, terms, doc);
    return lm_dirichlet_kernel(index, terms, tfs, doc, mu);
}

double score_bm25(const Index& index, const QueryModel& query, InternalId doc, double k1, double b) {
    if (k1 < 0.0 || b < 0.0 || b > 1.0) throw Error("BM25 requires k1 >= 0 and 0 <= b <= 1");
    auto terms = resolve(index, query, nullptr);
    auto tfs = lookup_tfs(index, terms, doc);
    return bm25_kernel(index, terms, tfs, doc, k1, b);
}

double score_idf(const Index& index, const QueryModel& query, InternalId doc) {
    auto terms = resolve(index, query, nullptr);
    auto tfs = lookup_tfs(index, terms, doc);
    return idf_kernel(index, terms, tfs);
}

double recency_prior(Timestamp query_time, Timestamp doc_time, double rate) {
    if (doc_time > query_time) {
        throw Error("document time " + std::to_string(doc_time) + " is after query time " + std::to_string(query_time));
    }
    return std::exp(-rate * static_cast<double>(query_time - doc_time));
}

void sort_by_score(std::vector<ScoredDoc>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
}

ScoredList search(const Index& index, const QueryModel& query, const ScorerParams& scorer, std::size_t k,
                  Timestamp query_time, std::string query_id, Diagnostics* diagnostics) {
    if (k == 0) throw Error("search depth k must be at least 1");
    if (scorer.kind == ScorerKind::lm_dirichlet || scorer.kind == ScorerKind::recency) {
        if (!(scorer.mu > 0.0)) throw Error("Dirichlet mu must be positive");
    }
    ScoredList result;
    result.query_id = std::move(query_id);
    const auto terms = resolve(index, query, diagnostics);
    if (terms.empty()) return result;

    // slot[doc] is the candidate's row in `tfs` (+1; 0 = not a candidate)
    std::vector<std::uint32_t> slot(index.doc_count(), 0);
    std::vector<InternalId> candidates;
    std::vector<std::uint32_t> tfs;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        for (const Posting& p : index.postings(terms[t].id)) {
            if (index.document(p.doc).timestamp > query_time) continue;
            if (slot[p.doc] == 0) {
                candidates.push_back(p.doc);
                slot[p.doc] = static_cast<std::uint32_t>(candidates.size());
                tfs.resize(tfs.size() + terms.size(), 0);
            }
            tfs[(slot[p.doc] - 1) * terms.size() + t] = p.tf;
        }
    }

    result.entries.reserve(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const InternalId doc = candidates[c];
        std::span<const std::uint32_t> row(tfs.data() + c * terms.size(), terms.size());
        result.entries.push_back({index.document(doc).doc_id, score_with(index, terms, row, doc, scorer, query_time), doc});
    }
    auto by_rank = [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    };
    if (result.entries.size() > k) {
        std::partial_sort(result.entries.begin(), result.entries.begin() + static_cast<std::ptrdiff_t>(k),
                          result.entries.end(), by_rank);
        result.entries.resize(k);
    } else {
        std::sort(result.entries.begin(), result.entries.end(), by_rank);
    }
    return result;
}

}  // namespace temporafed
