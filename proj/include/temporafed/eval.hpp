#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "temporafed/retrieval.hpp"
#include "temporafed/temporal.hpp"

namespace temporafed {

// --- TREC formats -------------------------------------------------------------

struct Topic {
    std::string query_id;
    std::string text;
    Timestamp query_time = 0;
};

/// TSV `query_id<TAB>query text<TAB>query_time`.
std::vector<Topic> read_topics(std::istream& in, const std::string& source_name);
std::vector<Topic> read_topics_file(const std::string& path);
std::string write_topics(const std::vector<Topic>& topics);

/// Graded judgments; grade >= 1 counts as relevant.
class Qrels {
  public:
    void set(const std::string& query_id, const std::string& doc_id, int grade);
    [[nodiscard]] int grade(const std::string& query_id, const std::string& doc_id) const;
    [[nodiscard]] bool relevant(const std::string& query_id, const std::string& doc_id) const {
        return grade(query_id, doc_id) >= 1;
    }
    [[nodiscard]] std::size_t relevant_count(const std::string& query_id) const;
    [[nodiscard]] std::vector<std::string> relevant_docs(const std::string& query_id) const;
    [[nodiscard]] std::vector<std::string> query_ids() const;
    [[nodiscard]] const std::map<std::string, std::map<std::string, int>>& judgments() const noexcept {
        return judgments_;
    }

  private:
    std::map<std::string, std::map<std::string, int>> judgments_;
};

/// Whitespace-separated `query_id 0 doc_id grade`, grade in {0,1,2}.
Qrels read_qrels(std::istream& in, const std::string& source_name);
Qrels read_qrels_file(const std::string& path);
std::string write_qrels(const Qrels& qrels);

struct RunFile {
    std::string tag;
    std::vector<ScoredList> queries;
};

/// `query_id Q0 doc_id rank score tag`, score with six decimals.
RunFile read_run(std::istream& in, const std::string& source_name);
RunFile read_run_file(const std::string& path);
std::string write_run(const RunFile& run);

// --- metrics ------------------------------------------------------------------

/// Unjudged documents count as non-relevant. nullopt when the query has no
/// relevant judgments.
std::optional<double> average_precision(const ScoredList& run, const Qrels& qrels, const std::string& query_id);
double precision_at_k(const ScoredList& run, const Qrels& qrels, const std::string& query_id, std::size_t k);
std::optional<double> rprec(const ScoredList& run, const Qrels& qrels, const std::string& query_id);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    std::size_t n = 0;
    bool degenerate = false;  // zero variance with a nonzero mean difference
};

/// Two-sided paired t-test on per-query scores.
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

using TimestampLookup = std::unordered_map<std::string, Timestamp>;

struct TemporalProfile {
    TimeHistogram truth;          // all R relevant documents
    TimeHistogram retrieved;      // every document in the top R
    std::vector<double> truth_counts;               // relevant documents per bin
    std::vector<double> retrieved_relevant_counts;  // relevant documents found in the top R, per bin
    double emd = 0.0;             // emd_1d(retrieved, truth)
};

/// Temporal decomposition of R-precision. nullopt when R = 0.
std::optional<TemporalProfile> temporal_rprec_profile(const ScoredList& run, const Qrels& qrels,
                                                      const std::string& query_id, const TimestampLookup& timestamps,
                                                      double period = kSecondsPerDay);

struct QueryMetrics {
    std::string query_id;
    double ap = 0.0;
    double p30 = 0.0;
    double rprec = 0.0;
    std::optional<double> emd;
};

struct EvaluationReport {
    std::vector<QueryMetrics> queries;  // query_id order
    double map = 0.0;
    double p30 = 0.0;
    double rprec = 0.0;
    std::optional<double> mean_emd;
    std::vector<std::string> warnings;
};

/// Evaluates every judged query with R >= 1 (queries missing from the run
/// score zero). EMD is filled when timestamps are supplied.
EvaluationReport evaluate(const RunFile& run, const Qrels& qrels, const TimestampLookup* timestamps = nullptr,
                          double period = kSecondsPerDay, const std::vector<std::string>* query_filter = nullptr);

/// CSV `query_id,AP,P30,Rprec,EMD` plus an `all` row.
std::string write_report(const EvaluationReport& report);

}  // namespace temporafed
