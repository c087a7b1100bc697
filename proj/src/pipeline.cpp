#include "temporafed/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "temporafed/io.hpp"

namespace temporafed {

namespace {

constexpr std::uint64_t kClusteringSalt = 1;
constexpr std::uint64_t kTrainingSalt = 2;

bool uses_corpus_density(Method m) {
    return m == Method::kde_score || m == Method::kde_rank || m == Method::ltr || m == Method::full;
}

WeightScheme corpus_scheme(const ExperimentConfig& config) {
    if (config.method == Method::kde_score) return WeightScheme::score;
    if (config.method == Method::kde_rank) return WeightScheme::rank;
    return config.kde_scheme;
}

ScoredList truncated(ScoredList list, std::size_t k) {
    if (list.entries.size() > k) list.entries.resize(k);
    return list;
}

ScoredList add_log_evidence(const Index& index, const ScoredList& candidates, const std::function<double(double)>& f) {
    ScoredList out = candidates;
    for (auto& e : out.entries) {
        const double t = static_cast<double>(index.document(e.internal).timestamp);
        e.score += std::log(std::max(f(t), kDensityFloor));
    }
    sort_by_score(out.entries);
    return out;
}

void merge(Diagnostics& into, Diagnostics&& from) {
    for (auto& w : from.warnings) into.warnings.push_back(std::move(w));
    into.malformed_records += from.malformed_records;
    into.duplicate_ids += from.duplicate_ids;
    into.skipped_query_terms += from.skipped_query_terms;
}

}  // namespace

bool uses_verticals(Method m) {
    return m == Method::rm_e || m == Method::rmt_e || m == Method::kde_e || m == Method::full;
}

bool uses_model(Method m) { return m == Method::ltr || m == Method::full; }

std::vector<Vertical> build_external_verticals(const std::vector<Document>& external, const ExperimentConfig& config) {
    ClusteringParams params;
    params.k = config.clusters;
    params.seed = derive_seed(config.seed, kClusteringSalt);
    params.batch_size = config.kmeans_batch;
    params.iterations = config.kmeans_iterations;
    return build_verticals(external, cluster_verticals(external, params));
}

QueryState prepare_query(const Collections& collections, const Topic& topic, const ExperimentConfig& config,
                         Diagnostics* diagnostics) {
    QueryState state;
    state.topic = topic;
    const QueryModel original = query_mle(tokenize(topic.text));
    state.query = original;
    if (original.empty()) {
        if (diagnostics) diagnostics->warn("query " + topic.query_id + " has no indexable terms");
        state.candidates.query_id = topic.query_id;
        return state;
    }

    const Method method = config.method;
    if (uses_verticals(method)) {
        if (collections.verticals.empty()) throw Error("method " + std::string(method_name(method)) + " needs external verticals");
        SelectionParams params;
        params.v_sel = config.v_sel;
        params.k_merge = config.k_merge;
        params.n_fb = config.n_fb;
        params.mu = config.mu;
        params.scheme = config.kde_scheme;
        params.period = config.period;
        try {
            state.selection = select_verticals(collections.verticals, original, params, topic.query_time, topic.query_id);
        } catch (const EmptySelectionError& e) {
            if (diagnostics) diagnostics->warn(std::string(e.what()) + "; external evidence skipped");
        }
    }
    if (state.selection && (method == Method::rm_e || method == Method::rmt_e || method == Method::full)) {
        const RelevanceModel feedback =
            method == Method::rm_e
                ? relevance_model_external(collections.verticals, *state.selection, config.n_fb, config.n_terms)
                : time_based_relevance_model(collections.verticals, *state.selection, config.n_fb, config.n_terms);
        state.expansion = interpolate_query(original, feedback, config.lambda);
        state.query = state.expansion->final_model;
    }

    ScorerParams scorer;
    scorer.kind = method == Method::recency ? ScorerKind::recency : config.scorer;
    scorer.mu = config.mu;
    scorer.k1 = config.bm25_k1;
    scorer.b = config.bm25_b;
    scorer.recency_rate = config.recency_rate;
    state.candidates = search(collections.main, state.query, scorer, std::max(config.depth, config.k), topic.query_time,
                              topic.query_id, diagnostics);

    if (uses_corpus_density(method) && !state.candidates.entries.empty()) {
        const std::size_t n = std::min(config.n_fb, state.candidates.entries.size());
        ScoredList top = state.candidates;
        top.entries.resize(n);
        state.corpus_density = fit_feedback_density(collections.main, top, corpus_scheme(config), config.period);
    }
    return state;
}

std::vector<FeatureVector> query_features(const Collections& collections, const QueryState& state,
                                          const ExperimentConfig& config, Diagnostics* diagnostics) {
    FeatureContext context;
    context.index = &collections.main;
    context.query = &state.query;
    context.corpus_density = state.corpus_density ? &*state.corpus_density : nullptr;
    context.selection = state.selection ? &*state.selection : nullptr;
    context.mu = config.mu;
    context.k1 = config.bm25_k1;
    context.b = config.bm25_b;
    // ltr never has external evidence; only full reports it missing
    Diagnostics local;
    auto features = extract_features(state.candidates, context, &local);
    if (diagnostics) {
        for (auto& w : local.warnings) {
            const bool expected = config.method != Method::full && w.find("external") != std::string::npos;
            if (!expected) diagnostics->warn(std::move(w));
        }
    }
    return features;
}

ScoredList rank_query(const Collections& collections, const QueryState& state, const ExperimentConfig& config,
                      const LTRModel* model, Diagnostics* diagnostics) {
    switch (config.method) {
        case Method::lmdir:
        case Method::recency:
        case Method::rm_e:
        case Method::rmt_e:
            return truncated(state.candidates, config.k);
        case Method::kde_score:
        case Method::kde_rank: {
            if (!state.corpus_density) return truncated(state.candidates, config.k);
            const TemporalDensity& f = *state.corpus_density;
            return truncated(add_log_evidence(collections.main, state.candidates, [&](double t) { return f(t); }),
                             config.k);
        }
        case Method::kde_e: {
            if (!state.selection) return truncated(state.candidates, config.k);
            const VerticalSelection& s = *state.selection;
            return truncated(
                add_log_evidence(collections.main, state.candidates,
                                 [&](double t) { return external_temporal_relevance(s, t); }),
                config.k);
        }
        case Method::ltr:
        case Method::full: {
            if (!model) throw Error("method " + std::string(method_name(config.method)) + " needs a trained model");
            const auto features = query_features(collections, state, config, diagnostics);
            return truncated(rerank(*model, state.candidates, features), config.k);
        }
    }
    return truncated(state.candidates, config.k);
}

RunFile run_topics(const Collections& collections, const std::vector<Topic>& topics, const ExperimentConfig& config,
                   const LTRModel* model, Diagnostics* diagnostics, std::vector<QueryState>* states) {
    if (config.k == 0) throw Error("run length k must be at least 1");
    if (uses_model(config.method) && !model) {
        throw Error("method " + std::string(method_name(config.method)) + " needs a trained model");
    }
    RunFile run;
    run.queries.resize(topics.size());
    std::vector<Diagnostics> local(topics.size());
    std::vector<QueryState> kept(states ? topics.size() : 0);
    parallel_for(topics.size(), [&](std::size_t i) {
        QueryState state = prepare_query(collections, topics[i], config, &local[i]);
        run.queries[i] = rank_query(collections, state, config, model, &local[i]);
        run.queries[i].query_id = topics[i].query_id;
        if (states) kept[i] = std::move(state);
    });
    if (diagnostics) {
        for (auto& d : local) merge(*diagnostics, std::move(d));
    }
    if (states) *states = std::move(kept);
    return run;
}

TrainingSet build_training_set(const Collections& collections, const std::vector<Topic>& topics, const Qrels& qrels,
                               const ExperimentConfig& config, Diagnostics* diagnostics) {
    TrainingSet training;
    training.queries.resize(topics.size());
    std::vector<Diagnostics> local(topics.size());
    parallel_for(topics.size(), [&](std::size_t i) {
        const QueryState state = prepare_query(collections, topics[i], config, &local[i]);
        TrainingQuery& q = training.queries[i];
        q.query_id = topics[i].query_id;
        q.features = query_features(collections, state, config, &local[i]);
        for (const auto& e : state.candidates.entries) {
            q.doc_ids.push_back(e.doc_id);
            q.labels.push_back(qrels.grade(q.query_id, e.doc_id));
        }
        q.relevant_total = qrels.relevant_count(q.query_id);
    });
    if (diagnostics) {
        for (auto& d : local) merge(*diagnostics, std::move(d));
    }
    return training;
}

LTRModel train_model(const Collections& collections, const std::vector<Topic>& topics, const Qrels& qrels,
                     const ExperimentConfig& config, Diagnostics* diagnostics) {
    if (!uses_model(config.method)) {
        throw Error("method " + std::string(method_name(config.method)) + " does not use a trained model");
    }
    const TrainingSet training = build_training_set(collections, topics, qrels, config, diagnostics);
    CoordinateAscentConfig ca;
    ca.restarts = config.ca_restarts;
    ca.max_iters = config.ca_max_iters;
    ca.tolerance = config.ca_tolerance;
    ca.seed = derive_seed(config.seed, kTrainingSalt);
    std::vector<double> init(kFeatureCount, 0.0);
    init[kLmDirichlet] = 1.0;
    ca.init = init;
    LTRModel model = train_coordinate_ascent(training, ca);
    model.config_hash = config_hash(config);
    return model;
}

}  // namespace temporafed
