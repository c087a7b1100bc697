#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "temporafed/corpus.hpp"
#include "temporafed/error.hpp"

namespace temporafed {

using InternalId = std::uint32_t;
using TermId = std::uint32_t;

inline constexpr Timestamp kNoTimeLimit = std::numeric_limits<Timestamp>::max();

struct Posting {
    InternalId doc;
    std::uint32_t tf;
};

/// Term -> weight. Plain queries carry counts c(w,q); expanded queries carry
/// probabilities. The weight multiplies each term's score contribution.
using QueryModel = std::map<std::string, double>;

QueryModel query_counts(const std::vector<std::string>& terms);

/// Inverted index over a document sequence. Internal ids follow input order.
class Index {
  public:
    static Index build(const Corpus& corpus);
    static Index build(std::vector<Document> documents);

    /// Persists the forward index (`documents.jsonl`) plus term statistics;
    /// load() rebuilds the postings deterministically from it.
    void save(const std::string& directory) const;
    static Index load(const std::string& directory);

    [[nodiscard]] std::size_t doc_count() const noexcept { return documents_.size(); }
    [[nodiscard]] std::uint64_t total_terms() const noexcept { return total_terms_; }
    [[nodiscard]] double avg_doc_length() const noexcept {
        return documents_.empty() ? 0.0 : static_cast<double>(total_terms_) / static_cast<double>(documents_.size());
    }
    [[nodiscard]] std::size_t vocabulary_size() const noexcept { return terms_.size(); }

    [[nodiscard]] std::optional<TermId> term_id(std::string_view term) const;
    [[nodiscard]] const std::string& term(TermId id) const { return terms_[id]; }
    [[nodiscard]] std::span<const Posting> postings(TermId id) const { return postings_[id]; }
    [[nodiscard]] std::uint64_t cf(TermId id) const { return cf_[id]; }
    [[nodiscard]] std::uint32_t df(TermId id) const { return static_cast<std::uint32_t>(postings_[id].size()); }
    /// Collection frequency by surface form; 0 for unknown terms.
    [[nodiscard]] std::uint64_t cf(std::string_view term) const;
    [[nodiscard]] std::uint32_t df(std::string_view term) const;
    [[nodiscard]] std::uint32_t tf(TermId id, InternalId doc) const;

    [[nodiscard]] std::uint32_t doc_length(InternalId doc) const { return documents_[doc].metadata.doc_length; }
    [[nodiscard]] const Document& document(InternalId doc) const { return documents_[doc]; }
    [[nodiscard]] const std::vector<Document>& documents() const noexcept { return documents_; }
    [[nodiscard]] std::optional<InternalId> find(std::string_view doc_id) const;

  private:
    std::vector<Document> documents_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, TermId> term_ids_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<std::uint64_t> cf_;
    std::unordered_map<std::string, InternalId> doc_ids_;
    std::uint64_t total_terms_ = 0;
};

// --- scoring ----------------------------------------------------------------

enum class ScorerKind { lm_dirichlet, bm25, idf, recency };

/// ln 2 over a three-day half-life, in 1/seconds.
inline const double kDefaultRecencyRate = std::log(2.0) / (3.0 * 86400.0);

struct ScorerParams {
    ScorerKind kind = ScorerKind::lm_dirichlet;
    double mu = 2500.0;
    double k1 = 1.2;
    double b = 0.75;
    double recency_rate = kDefaultRecencyRate;
};

ScorerKind parse_scorer(std::string_view name);

/// Query likelihood with Dirichlet smoothing (log-probability). Terms absent
/// from the collection are skipped and counted in diagnostics.
double score_lm_dirichlet(const Index& index, const QueryModel& query, InternalId doc, double mu,
                          Diagnostics* diagnostics = nullptr);

/// Okapi BM25 with the non-negative RSJ idf.
double score_bm25(const Index& index, const QueryModel& query, InternalId doc, double k1, double b);

/// Sum of log(N/df) over query terms present in the document.
double score_idf(const Index& index, const QueryModel& query, InternalId doc);

/// exp(-rate * age); throws for documents newer than the query.
double recency_prior(Timestamp query_time, Timestamp doc_time, double rate);

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
    InternalId internal = 0;  // id within the index that produced the entry
};

/// Rank-ordered list; rank of entries[i] is i + 1.
struct ScoredList {
    std::string query_id;
    std::vector<ScoredDoc> entries;
};

/// Orders by score descending, doc_id ascending.
void sort_by_score(std::vector<ScoredDoc>& entries);

/// Top-k documents containing at least one query term, restricted to
/// timestamp <= query_time.
ScoredList search(const Index& index, const QueryModel& query, const ScorerParams& scorer, std::size_t k,
                  Timestamp query_time = kNoTimeLimit, std::string query_id = {}, Diagnostics* diagnostics = nullptr);

}  // namespace temporafed
