#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "temporafed/eval.hpp"
#include "temporafed/io.hpp"

namespace temporafed {

std::optional<double> average_precision(const ScoredList& run, const Qrels& qrels, const std::string& query_id) {
    const std::size_t r = qrels.relevant_count(query_id);
    if (r == 0) return std::nullopt;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < run.entries.size(); ++i) {
        if (qrels.relevant(query_id, run.entries[i].doc_id)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(r);
}

double precision_at_k(const ScoredList& run, const Qrels& qrels, const std::string& query_id, std::size_t k) {
    if (k == 0) throw Error("precision cutoff must be at least 1");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(k, run.entries.size()); ++i) {
        if (qrels.relevant(query_id, run.entries[i].doc_id)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

std::optional<double> rprec(const ScoredList& run, const Qrels& qrels, const std::string& query_id) {
    const std::size_t r = qrels.relevant_count(query_id);
    if (r == 0) return std::nullopt;
    return precision_at_k(run, qrels, query_id, r);
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error("paired t-test needs equally sized samples");
    if (a.size() < 2) throw Error("paired t-test needs at least two pairs");
    const std::size_t n = a.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult result;
    result.n = n;
    // relative guard: differences like [1,1,1,1] can leave rounding residue
    const double scale = std::max(std::abs(mean), 1.0);
    if (sd <= 1e-12 * scale) {
        if (mean == 0.0) return result;
        result.degenerate = true;
        result.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        result.p = 0.0;
        return result;
    }
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    boost::math::students_t dist(static_cast<double>(n - 1));
    result.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t)));
    return result;
}

std::optional<TemporalProfile> temporal_rprec_profile(const ScoredList& run, const Qrels& qrels,
                                                      const std::string& query_id, const TimestampLookup& timestamps,
                                                      double period) {
    const std::size_t r = qrels.relevant_count(query_id);
    if (r == 0) return std::nullopt;

    std::vector<double> truth_times;
    for (const auto& doc : qrels.relevant_docs(query_id)) {
        if (auto it = timestamps.find(doc); it != timestamps.end()) truth_times.push_back(static_cast<double>(it->second));
    }
    std::vector<double> top_times;
    std::vector<double> top_relevant_times;
    for (std::size_t i = 0; i < std::min(r, run.entries.size()); ++i) {
        auto it = timestamps.find(run.entries[i].doc_id);
        if (it == timestamps.end()) continue;
        top_times.push_back(static_cast<double>(it->second));
        if (qrels.relevant(query_id, run.entries[i].doc_id)) top_relevant_times.push_back(static_cast<double>(it->second));
    }

    double first = std::numeric_limits<double>::infinity();
    for (double t : truth_times) first = std::min(first, t);
    for (double t : top_times) first = std::min(first, t);
    const double origin = std::isfinite(first) ? std::floor(first / period) * period : 0.0;

    auto counts = [&](const std::vector<double>& times) {
        std::vector<double> c;
        for (double t : times) {
            const auto bin = static_cast<std::size_t>(std::floor((t - origin) / period));
            if (bin >= c.size()) c.resize(bin + 1, 0.0);
            c[bin] += 1.0;
        }
        return c;
    };

    TemporalProfile profile;
    profile.truth = histogram(truth_times, std::vector<double>(truth_times.size(), 1.0), period, origin);
    profile.retrieved = histogram(top_times, std::vector<double>(top_times.size(), 1.0), period, origin);
    profile.truth_counts = counts(truth_times);
    profile.retrieved_relevant_counts = counts(top_relevant_times);
    const std::size_t bins = std::max(profile.truth_counts.size(), profile.retrieved_relevant_counts.size());
    profile.truth_counts.resize(bins, 0.0);
    profile.retrieved_relevant_counts.resize(bins, 0.0);
    profile.emd = emd_1d(profile.retrieved, profile.truth);
    return profile;
}

EvaluationReport evaluate(const RunFile& run, const Qrels& qrels, const TimestampLookup* timestamps, double period,
                          const std::vector<std::string>* query_filter) {
    EvaluationReport report;
    std::map<std::string, const ScoredList*> lists;
    for (const auto& q : run.queries) lists[q.query_id] = &q;
    const ScoredList empty;

    std::vector<std::string> ids = query_filter ? *query_filter : qrels.query_ids();
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    double emd_sum = 0.0;
    std::size_t emd_n = 0;
    for (const auto& id : ids) {
        auto it = lists.find(id);
        const ScoredList& list = it == lists.end() ? empty : *it->second;
        auto ap = average_precision(list, qrels, id);
        if (!ap) {
            report.warnings.push_back("query " + id + " has no relevant judgments; excluded");
            continue;
        }
        QueryMetrics m;
        m.query_id = id;
        m.ap = *ap;
        m.p30 = precision_at_k(list, qrels, id, 30);
        m.rprec = *rprec(list, qrels, id);
        if (timestamps) {
            if (auto profile = temporal_rprec_profile(list, qrels, id, *timestamps, period)) {
                m.emd = profile->emd;
                emd_sum += profile->emd;
                ++emd_n;
            }
        }
        report.queries.push_back(m);
    }
    for (const auto& q : run.queries) {
        if (query_filter) break;
        if (!std::binary_search(ids.begin(), ids.end(), q.query_id)) {
            report.warnings.push_back("query " + q.query_id + " has no judgments; excluded");
        }
    }
    if (!report.queries.empty()) {
        const double n = static_cast<double>(report.queries.size());
        for (const auto& m : report.queries) {
            report.map += m.ap;
            report.p30 += m.p30;
            report.rprec += m.rprec;
        }
        report.map /= n;
        report.p30 /= n;
        report.rprec /= n;
    }
    if (emd_n > 0) report.mean_emd = emd_sum / static_cast<double>(emd_n);
    return report;
}

std::string write_report(const EvaluationReport& report) {
    std::string out = "query_id,AP,P30,Rprec,EMD\n";
    auto emd = [](const std::optional<double>& v) { return v ? format_fixed(*v, 4) : std::string{}; };
    for (const auto& m : report.queries) {
        out += m.query_id + ',' + format_fixed(m.ap, 4) + ',' + format_fixed(m.p30, 4) + ',' + format_fixed(m.rprec, 4) +
               ',' + emd(m.emd) + '\n';
    }
    out += "all," + format_fixed(report.map, 4) + ',' + format_fixed(report.p30, 4) + ',' + format_fixed(report.rprec, 4) +
           ',' + emd(report.mean_emd) + '\n';
    return out;
}

}  // namespace temporafed
