#include "temporafed/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace temporafed {

namespace {

struct FeedbackDoc {
    const Document* doc;
    std::uint32_t vertical_id;
    double query_likelihood;  // P(q|d), softmax within the vertical's set
};

/// Feedback documents per selected vertical, truncated to n_fb.
std::vector<std::vector<FeedbackDoc>> gather(const std::vector<Vertical>& verticals, const VerticalSelection& selection,
                                             std::size_t n_fb) {
    if (n_fb == 0) throw Error("n_fb must be at least 1");
    std::vector<std::vector<FeedbackDoc>> sets;
    bool any = false;
    for (const auto& entry : selection.selected) {
        if (entry.position >= verticals.size() || verticals[entry.position].id != entry.vertical_id) {
            throw Error("selection does not match the vertical set");
        }
        const Index& index = verticals[entry.position].index;
        const std::size_t n = std::min(n_fb, entry.feedback.entries.size());
        std::vector<FeedbackDoc> set;
        if (n > 0) {
            double top = entry.feedback.entries.front().score;
            for (std::size_t i = 0; i < n; ++i) top = std::max(top, entry.feedback.entries[i].score);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& e = entry.feedback.entries[i];
                const double p = std::exp(e.score - top);
                set.push_back({&index.document(e.internal), entry.vertical_id, p});
                total += p;
            }
            for (auto& f : set) f.query_likelihood /= total;
            any = true;
        }
        sets.push_back(std::move(set));
    }
    if (!any) throw EmptySelectionError("no feedback documents in any selected vertical for query " + selection.query_id);
    return sets;
}

void add_document(std::map<std::string, double>& mass, const Document& doc, double weight) {
    if (doc.tokens.empty() || weight == 0.0) return;
    const double inv_len = 1.0 / static_cast<double>(doc.tokens.size());
    std::unordered_map<std::string_view, std::uint32_t> counts;
    for (const auto& t : doc.tokens) ++counts[t];
    for (const auto& [term, tf] : counts) mass[std::string(term)] += weight * static_cast<double>(tf) * inv_len;
}

/// Keeps the n_terms heaviest terms (ties by term) and renormalizes.
std::map<std::string, double> truncate_and_normalize(const std::map<std::string, double>& mass, std::size_t n_terms) {
    std::vector<std::pair<std::string, double>> ranked(mass.begin(), mass.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > n_terms) ranked.resize(n_terms);
    double total = 0.0;
    for (const auto& [term, w] : ranked) total += w;
    std::map<std::string, double> out;
    if (!(total > 0.0)) throw Error("feedback model has no positive term mass");
    for (const auto& [term, w] : ranked) out[term] = w / total;
    return out;
}

RelevanceModel document_weighted_model(const std::vector<Vertical>& verticals, const VerticalSelection& selection,
                                       std::size_t n_fb, std::size_t n_terms, const TemporalRelevance* temporal) {
    if (n_terms == 0) throw Error("n_terms must be at least 1");
    const auto sets = gather(verticals, selection, n_fb);
    RelevanceModel model;
    std::map<std::string, double> mass;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& set = sets[s];
        if (set.empty()) continue;
        const double vertical_weight = selection.selected[s].weight / static_cast<double>(set.size());
        for (const auto& f : set) {
            double weight = vertical_weight * f.query_likelihood;
            if (temporal) weight *= std::max((*temporal)(static_cast<double>(f.doc->timestamp)), kDensityFloor);
            add_document(mass, *f.doc, weight);
            model.provenance.push_back({f.vertical_id, f.doc->doc_id, weight});
        }
    }
    model.terms = truncate_and_normalize(mass, n_terms);
    return model;
}

}  // namespace

QueryModel query_mle(const std::vector<std::string>& terms) {
    QueryModel model;
    if (terms.empty()) return model;
    for (const auto& t : terms) model[t] += 1.0;
    for (auto& [t, w] : model) w /= static_cast<double>(terms.size());
    return model;
}

RelevanceModel relevance_model_external(const std::vector<Vertical>& verticals, const VerticalSelection& selection,
                                        std::size_t n_fb, std::size_t n_terms) {
    return document_weighted_model(verticals, selection, n_fb, n_terms, nullptr);
}

RelevanceModel time_based_relevance_model(const std::vector<Vertical>& verticals, const VerticalSelection& selection,
                                          std::size_t n_fb, std::size_t n_terms, const TemporalRelevance& temporal) {
    if (temporal) return document_weighted_model(verticals, selection, n_fb, n_terms, &temporal);
    const TemporalRelevance external = [&selection](double t) { return external_temporal_relevance(selection, t); };
    return document_weighted_model(verticals, selection, n_fb, n_terms, &external);
}

RelevanceModel discrete_time_relevance_model(const std::vector<Vertical>& verticals,
                                             const VerticalSelection& selection, double period, std::size_t n_fb,
                                             std::size_t n_terms, const TimeHistogram* period_prior) {
    if (!(period > 0.0)) throw Error("time period must be positive");
    if (n_terms == 0) throw Error("n_terms must be at least 1");
    const auto sets = gather(verticals, selection, n_fb);

    TimeHistogram prior;
    if (period_prior) {
        prior = *period_prior;
        if (prior.period != period) throw Error("period prior uses a different period length");
    } else {
        std::vector<double> times;
        for (const auto& set : sets) {
            for (const auto& f : set) times.push_back(static_cast<double>(f.doc->timestamp));
        }
        const double first = *std::min_element(times.begin(), times.end());
        const std::vector<double> ones(times.size(), 1.0);
        prior = histogram(times, ones, period, std::floor(first / period) * period);
    }
    auto bin_of = [&](const Document& d) -> std::ptrdiff_t {
        const double offset = (static_cast<double>(d.timestamp) - prior.origin) / period;
        return offset < 0.0 ? -1 : static_cast<std::ptrdiff_t>(std::floor(offset));
    };

    RelevanceModel model;
    std::map<std::string, double> mass;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const double collection_weight = selection.selected[s].weight;
        std::map<std::ptrdiff_t, double> bin_likelihood;  // sum of P(q|d) within T
        for (const auto& f : sets[s]) bin_likelihood[bin_of(*f.doc)] += f.query_likelihood;
        for (const auto& f : sets[s]) {
            const auto bin = bin_of(*f.doc);
            const double p_period = (bin >= 0 && static_cast<std::size_t>(bin) < prior.masses.size())
                                        ? prior.masses[static_cast<std::size_t>(bin)]
                                        : 0.0;
            const double within = bin_likelihood[bin];
            if (p_period == 0.0 || !(within > 0.0)) continue;
            const double weight = collection_weight * p_period * f.query_likelihood / within;
            add_document(mass, *f.doc, weight);
            model.provenance.push_back({f.vertical_id, f.doc->doc_id, weight});
        }
    }
    model.terms = truncate_and_normalize(mass, n_terms);
    return model;
}

ExpandedQuery interpolate_query(const QueryModel& original, const RelevanceModel& feedback, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("interpolation lambda must lie in [0, 1]");
    ExpandedQuery q;
    q.original = original;
    q.feedback = feedback;
    q.lambda = lambda;
    for (const auto& [term, w] : original) q.final_model[term] += lambda * w;
    for (const auto& [term, w] : feedback.terms) q.final_model[term] += (1.0 - lambda) * w;
    for (auto it = q.final_model.begin(); it != q.final_model.end();) {
        it = it->second == 0.0 ? q.final_model.erase(it) : std::next(it);
    }
    return q;
}

CorpusTemporalFeedback corpus_temporal_feedback(const Index& index, const QueryModel& query, std::size_t n_fb,
                                                WeightScheme scheme, Timestamp query_time, double mu, double period) {
    if (n_fb == 0) throw Error("n_fb must be at least 1");
    ScorerParams scorer;
    scorer.mu = mu;
    ScoredList docs = search(index, query, scorer, n_fb, query_time);
    if (docs.entries.empty()) throw DegenerateSampleError("no corpus feedback documents");
    TemporalDensity density = fit_feedback_density(index, docs, scheme, period);
    return {std::move(docs), std::move(density)};
}

}  // namespace temporafed
