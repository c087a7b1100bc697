#include "temporafed/ltr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "temporafed/io.hpp"
#include "temporafed/random.hpp"

namespace temporafed {

namespace {

const double kLogFloor = std::log(kDensityFloor);

double floored_log(double x) { return std::log(std::max(x, kDensityFloor)); }

double min_max(double x, double lo, double hi) {
    if (!(hi > lo)) return 1.0;
    return (x - lo) / (hi - lo);
}

}  // namespace

ScoreRanges score_ranges(const FeatureContext& context, std::span<const InternalId> candidates) {
    ScoreRanges r;
    bool first = true;
    for (InternalId doc : candidates) {
        const double bm25 = score_bm25(*context.index, *context.query, doc, context.k1, context.b);
        const double idf = score_idf(*context.index, *context.query, doc);
        if (first) {
            r = {bm25, bm25, idf, idf};
            first = false;
        } else {
            r.bm25_min = std::min(r.bm25_min, bm25);
            r.bm25_max = std::max(r.bm25_max, bm25);
            r.idf_min = std::min(r.idf_min, idf);
            r.idf_max = std::max(r.idf_max, idf);
        }
    }
    return r;
}

FeatureVector extract_features(InternalId doc, const FeatureContext& context, const ScoreRanges& ranges) {
    const Index& index = *context.index;
    const Document& d = index.document(doc);
    const Metadata& m = d.metadata;
    const double t = static_cast<double>(d.timestamp);

    FeatureVector f(kFeatureCount, 0.0);
    f[kLmDirichlet] = score_lm_dirichlet(index, *context.query, doc, context.mu);
    f[kBm25] = floored_log(min_max(score_bm25(index, *context.query, doc, context.k1, context.b), ranges.bm25_min,
                                   ranges.bm25_max));
    f[kIdf] = floored_log(min_max(score_idf(index, *context.query, doc), ranges.idf_min, ranges.idf_max));
    f[kCorpusTemporal] = context.corpus_density ? floored_log((*context.corpus_density)(t)) : kLogFloor;
    f[kExternalTemporal] = context.selection ? floored_log(external_temporal_relevance(*context.selection, t)) : kLogFloor;
    f[kDocLength] = std::log1p(static_cast<double>(m.doc_length));
    f[kUrlCount] = std::log1p(static_cast<double>(m.url_count));
    f[kHashtagCount] = std::log1p(static_cast<double>(m.hashtag_count));
    f[kMentionCount] = std::log1p(static_cast<double>(m.mention_count));
    f[kHasUrl] = m.url_count > 0 ? 1.0 : 0.0;
    f[kHasHashtags] = m.hashtag_count > 0 ? 1.0 : 0.0;
    f[kHasMentions] = m.mention_count > 0 ? 1.0 : 0.0;
    f[kIsReply] = m.is_reply ? 1.0 : 0.0;
    f[kStatusesCount] = std::log1p(static_cast<double>(m.statuses_count));
    f[kFollowersCount] = std::log1p(static_cast<double>(m.followers_count));
    return f;
}

std::vector<FeatureVector> extract_features(const ScoredList& candidates, const FeatureContext& context,
                                            Diagnostics* diagnostics) {
    if (!context.index || !context.query) throw Error("feature context needs an index and a query");
    if (diagnostics && !candidates.entries.empty()) {
        if (!context.corpus_density) diagnostics->warn(candidates.query_id + ": corpus temporal density absent; floored");
        if (!context.selection) diagnostics->warn(candidates.query_id + ": external temporal mixture absent; floored");
    }
    std::vector<InternalId> docs;
    docs.reserve(candidates.entries.size());
    for (const auto& e : candidates.entries) docs.push_back(e.internal);
    const ScoreRanges ranges = score_ranges(context, docs);
    std::vector<FeatureVector> out;
    out.reserve(docs.size());
    for (InternalId doc : docs) out.push_back(extract_features(doc, context, ranges));
    return out;
}

double score_loglinear(const LTRModel& model, std::span<const double> features) {
    if (features.size() != model.weights.size()) {
        throw Error("feature arity " + std::to_string(features.size()) + " does not match model arity " +
                    std::to_string(model.weights.size()));
    }
    double s = model.intercept;
    for (std::size_t i = 0; i < features.size(); ++i) s += model.weights[i] * features[i];
    return s;
}

ScoredList rerank(const LTRModel& model, const ScoredList& candidates, const std::vector<FeatureVector>& features) {
    if (features.size() != candidates.entries.size()) throw Error("one feature vector per candidate required");
    ScoredList out;
    out.query_id = candidates.query_id;
    out.entries = candidates.entries;
    for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i].score = score_loglinear(model, features[i]);
    sort_by_score(out.entries);
    return out;
}

// --- training -----------------------------------------------------------------

namespace {

// Training data flattened for fast re-scoring: scores move by (v - w_i) * f_i
// when one coordinate changes.
struct PreparedQuery {
    std::size_t docs = 0;
    std::vector<double> features;     // docs x arity, row-major
    std::vector<char> relevant;
    std::vector<std::uint32_t> tie;   // doc_id order, breaks score ties
    double relevant_total = 0.0;
};

std::vector<PreparedQuery> prepare(const TrainingSet& training, std::size_t arity) {
    std::vector<PreparedQuery> out;
    for (const auto& q : training.queries) {
        if (q.relevant_total == 0) continue;
        if (q.features.size() != q.doc_ids.size() || q.labels.size() != q.doc_ids.size()) {
            throw Error("training query " + q.query_id + " has mismatched features, labels and documents");
        }
        PreparedQuery p;
        p.docs = q.doc_ids.size();
        p.relevant_total = static_cast<double>(q.relevant_total);
        p.features.reserve(p.docs * arity);
        for (const auto& f : q.features) {
            if (f.size() != arity) throw Error("training query " + q.query_id + " has inconsistent feature arity");
            p.features.insert(p.features.end(), f.begin(), f.end());
        }
        for (int label : q.labels) p.relevant.push_back(label >= 1 ? 1 : 0);
        std::vector<std::uint32_t> order(p.docs);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return q.doc_ids[a] < q.doc_ids[b]; });
        p.tie.resize(p.docs);
        for (std::uint32_t r = 0; r < order.size(); ++r) p.tie[order[r]] = r;
        out.push_back(std::move(p));
    }
    return out;
}

double query_ap(const PreparedQuery& q, const std::vector<double>& scores, std::vector<std::uint32_t>& order) {
    order.resize(q.docs);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return q.tie[a] < q.tie[b];
    });
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (q.relevant[order[i]]) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / q.relevant_total;
}

class Objective {
  public:
    Objective(const std::vector<PreparedQuery>& queries, std::size_t arity) : queries_(queries), arity_(arity) {}

    void reset(const std::vector<double>& weights) {
        scores_.assign(queries_.size(), {});
        for (std::size_t qi = 0; qi < queries_.size(); ++qi) {
            const auto& q = queries_[qi];
            auto& s = scores_[qi];
            s.assign(q.docs, 0.0);
            for (std::size_t d = 0; d < q.docs; ++d) {
                for (std::size_t i = 0; i < arity_; ++i) s[d] += weights[i] * q.features[d * arity_ + i];
            }
        }
    }

    // MAP if coordinate i moved by delta, without committing.
    double probe(std::size_t i, double delta) {
        double total = 0.0;
        for (std::size_t qi = 0; qi < queries_.size(); ++qi) {
            const auto& q = queries_[qi];
            scratch_ = scores_[qi];
            for (std::size_t d = 0; d < q.docs; ++d) scratch_[d] += delta * q.features[d * arity_ + i];
            total += query_ap(q, scratch_, order_);
        }
        return total / static_cast<double>(queries_.size());
    }

    void commit(std::size_t i, double delta) {
        for (std::size_t qi = 0; qi < queries_.size(); ++qi) {
            const auto& q = queries_[qi];
            for (std::size_t d = 0; d < q.docs; ++d) scores_[qi][d] += delta * q.features[d * arity_ + i];
        }
    }

    double current() { return probe(0, 0.0); }

  private:
    const std::vector<PreparedQuery>& queries_;
    std::size_t arity_;
    std::vector<std::vector<double>> scores_;
    std::vector<double> scratch_;
    std::vector<std::uint32_t> order_;
};

std::size_t training_arity(const TrainingSet& training) {
    for (const auto& q : training.queries) {
        if (!q.features.empty()) return q.features.front().size();
    }
    return 0;
}

std::vector<double> probe_values(double w) {
    std::vector<double> values = {w * 0.5, w * 0.9, w * 1.1, w * 2.0, -w,
                                  w + 0.05, w - 0.05, w + 0.5, w - 0.5,
                                  0.05, -0.05, 0.5, -0.5};
    std::vector<double> out;
    for (double v : values) {
        if (v != w && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

}  // namespace

double training_map(const TrainingSet& training, std::span<const double> weights) {
    const std::size_t arity = weights.size();
    const auto queries = prepare(training, arity);
    if (queries.empty()) throw Error("training set has no query with relevant documents");
    double total = 0.0;
    std::vector<double> scores;
    std::vector<std::uint32_t> order;
    for (const auto& q : queries) {
        scores.assign(q.docs, 0.0);
        for (std::size_t d = 0; d < q.docs; ++d) {
            for (std::size_t i = 0; i < arity; ++i) scores[d] += weights[i] * q.features[d * arity + i];
        }
        total += query_ap(q, scores, order);
    }
    return total / static_cast<double>(queries.size());
}

LTRModel train_coordinate_ascent(const TrainingSet& training, const CoordinateAscentConfig& config) {
    const std::size_t arity = config.init ? config.init->size() : training_arity(training);
    if (arity == 0) throw Error("training set has no feature vectors");
    const auto queries = prepare(training, arity);
    bool any_relevant = false;
    for (const auto& q : queries) {
        for (char r : q.relevant) any_relevant = any_relevant || r;
    }
    if (!any_relevant) throw Error("training set has no relevant candidate documents");
    if (config.restarts == 0) throw Error("coordinate ascent needs at least one restart");

    Rng rng(config.seed);
    Objective objective(queries, arity);
    LTRModel best;
    double best_map = -1.0;
    for (std::size_t restart = 0; restart < config.restarts; ++restart) {
        std::vector<double> w(arity);
        if (restart == 0) {
            if (config.init) {
                w = *config.init;
            } else {
                std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(arity));
            }
        } else {
            for (auto& x : w) x = rng.uniform(-1.0, 1.0);
        }
        objective.reset(w);
        double map = objective.current();
        std::vector<double> trace = {map};
        for (std::size_t cycle = 0; cycle < config.max_iters; ++cycle) {
            const double start = map;
            for (std::size_t i = 0; i < arity; ++i) {
                double best_value = w[i];
                double best_probe = map;
                for (double v : probe_values(w[i])) {
                    const double m = objective.probe(i, v - w[i]);
                    if (m > best_probe) {
                        best_probe = m;
                        best_value = v;
                    }
                }
                if (best_value != w[i]) {
                    objective.commit(i, best_value - w[i]);
                    w[i] = best_value;
                    map = best_probe;
                }
            }
            trace.push_back(map);
            if (map - start < config.tolerance) break;
        }
        if (map > best_map) {
            best_map = map;
            best.weights = w;
            best.map_trace = std::move(trace);
        }
    }
    return best;
}

// --- model persistence --------------------------------------------------------

std::string write_model(const LTRModel& model, std::span<const std::string_view> names) {
    if (names.size() != model.weights.size()) throw Error("feature names do not match model arity");
    auto exact = [](double v) {
        char buffer[40];
        std::snprintf(buffer, sizeof buffer, "%.17g", v);
        return std::string(buffer);
    };
    std::string out = "# temporafed-ltr config=" + (model.config_hash.empty() ? std::string("none") : model.config_hash) + "\n";
    out += "intercept\t" + exact(model.intercept) + "\n";
    for (std::size_t i = 0; i < names.size(); ++i) out += std::string(names[i]) + '\t' + exact(model.weights[i]) + '\n';
    return out;
}

LTRModel read_model(const std::string& text, const std::string& source_name, std::span<const std::string_view> names) {
    LTRModel model;
    model.weights.assign(names.size(), 0.0);
    std::vector<bool> seen(names.size(), false);
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.starts_with("#")) {
            const std::string marker = "# temporafed-ltr config=";
            if (line_no == 1 && line.starts_with(marker)) {
                model.config_hash = line.substr(marker.size());
                header = true;
                continue;
            }
            throw ParseError(source_name, line_no, "unexpected comment line");
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(source_name, line_no, "expected name<TAB>weight");
        const std::string name = line.substr(0, tab);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(line.substr(tab + 1), &used);
            if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(source_name, line_no, "bad weight");
        }
        if (name == "intercept") {
            model.intercept = value;
            continue;
        }
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ParseError(source_name, line_no, "unknown feature '" + name + "'");
        const auto i = static_cast<std::size_t>(it - names.begin());
        if (seen[i]) throw ParseError(source_name, line_no, "duplicate feature '" + name + "'");
        seen[i] = true;
        model.weights[i] = value;
    }
    if (!header) throw ParseError(source_name, 1, "missing model header");
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!seen[i]) throw ParseError(source_name, line_no, "missing feature '" + std::string(names[i]) + "'");
    }
    return model;
}

std::string write_training_log(const LTRModel& model) {
    std::string out = "iteration,MAP\n";
    for (std::size_t i = 0; i < model.map_trace.size(); ++i) {
        out += std::to_string(i) + ',' + format_fixed(model.map_trace[i], 6) + '\n';
    }
    return out;
}

}  // namespace temporafed
