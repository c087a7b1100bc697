// temporafed command-line driver.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "temporafed/config.hpp"
#include "temporafed/corpus.hpp"
#include "temporafed/eval.hpp"
#include "temporafed/feedback.hpp"
#include "temporafed/io.hpp"
#include "temporafed/ltr.hpp"
#include "temporafed/pipeline.hpp"
#include "temporafed/synthbench.hpp"

namespace fs = std::filesystem;
using namespace temporafed;

namespace {

struct Options {
    std::string config_path;
    std::string method;
    std::string topics;
    std::string train_topics;
    std::string qrels;
    std::string corpus;
    std::string index;
    std::string external;
    std::string verticals;
    std::string accounts;
    std::string model;
    std::string run;
    std::string baseline;
    std::string out;
    std::string log;
    std::vector<std::string> set;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> clusters;
    std::string source = "corpus";
    double step = 0.0;
    // synth
    std::optional<std::size_t> n_queries;
    std::optional<std::size_t> main_docs;
    std::optional<std::size_t> external_docs;
    std::optional<double> concentration;
};

ExperimentConfig resolve_config(const Options& o) {
    ExperimentConfig c;
    if (!o.config_path.empty()) c = read_config_file(o.config_path, c);
    for (const auto& entry : o.set) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw Error("--set expects key=value, got '" + entry + "'");
        set_config_value(c, entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (!o.method.empty()) c.method = parse_method(o.method);
    if (o.seed) c.seed = *o.seed;
    if (o.k) c.k = *o.k;
    if (o.depth) c.depth = *o.depth;
    if (o.clusters) c.clusters = *o.clusters;
    return c;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw Error(std::string("missing required option ") + flag);
}

void report(const Diagnostics& d) {
    for (const auto& w : d.warnings) std::cerr << "temporafed: warning: " << w << '\n';
}

std::map<std::string, AccountStats> accounts_of(const Options& o) {
    if (o.accounts.empty()) return {};
    std::ifstream in(o.accounts);
    if (!in) throw Error("cannot open account statistics " + o.accounts);
    return read_account_stats(in, o.accounts);
}

Index main_index(const Options& o, Diagnostics& d) {
    if (!o.index.empty()) return Index::load(o.index);
    if (o.corpus.empty()) throw Error("missing required option --corpus (or --index)");
    return Index::build(ingest_file(o.corpus, {}, &d));
}

std::vector<Vertical> external_verticals(const Options& o, const ExperimentConfig& c, Diagnostics& d) {
    if (!o.verticals.empty()) return load_verticals(o.verticals);
    if (o.external.empty()) throw Error("missing required option --external (or --verticals)");
    const auto accounts = accounts_of(o);
    IngestOptions options;
    if (!accounts.empty()) options.accounts = &accounts;
    const Corpus external = ingest_file(o.external, options, &d);
    return build_external_verticals(external.documents(), c);
}

Collections load_collections(const Options& o, const ExperimentConfig& c, Diagnostics& d) {
    Collections collections;
    collections.main = main_index(o, d);
    if (uses_verticals(c.method)) collections.verticals = external_verticals(o, c, d);
    return collections;
}

LTRModel obtain_model(const Options& o, const Collections& collections, const ExperimentConfig& c, Diagnostics& d) {
    if (!o.model.empty()) {
        LTRModel model = read_model(read_file(o.model), o.model);
        if (model.config_hash != config_hash(c)) {
            d.warn("model " + o.model + " was trained under config " + model.config_hash + ", current config is " +
                   config_hash(c));
        }
        return model;
    }
    if (o.train_topics.empty() || o.qrels.empty()) {
        throw Error("method " + std::string(method_name(c.method)) + " needs --model or --train-topics with --qrels");
    }
    return train_model(collections, read_topics_file(o.train_topics), read_qrels_file(o.qrels), c, &d);
}

std::string tsv_weights(const std::map<std::string, double>& terms) {
    std::vector<std::pair<std::string, double>> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::string out;
    for (const auto& [term, w] : sorted) out += term + '\t' + format_fixed(w, 6) + '\n';
    return out;
}

TimestampLookup timestamps_of(const Index& index) {
    TimestampLookup lookup;
    for (const auto& doc : index.documents()) lookup.emplace(doc.doc_id, doc.timestamp);
    return lookup;
}

// --- subcommands ----------------------------------------------------------------

void cmd_index(const Options& o) {
    require(o.corpus, "--corpus");
    require(o.out, "--out");
    Diagnostics d;
    const auto accounts = accounts_of(o);
    IngestOptions options;
    if (!accounts.empty()) options.accounts = &accounts;
    const Index index = Index::build(ingest_file(o.corpus, options, &d));
    index.save(o.out);
    report(d);
    std::cout << "indexed " << index.doc_count() << " documents, " << index.vocabulary_size() << " terms\n";
}

void cmd_cluster(const Options& o) {
    require(o.out, "--out");
    const ExperimentConfig c = resolve_config(o);
    Diagnostics d;
    Options source = o;
    source.verticals.clear();
    const auto verticals = external_verticals(source, c, d);
    save_verticals(o.out, verticals);
    report(d);
    std::cout << "wrote " << verticals.size() << " verticals\n";
}

void cmd_select(const Options& o) {
    require(o.topics, "--topics");
    require(o.out, "--out");
    ExperimentConfig c = resolve_config(o);
    Diagnostics d;
    const auto verticals = external_verticals(o, c, d);
    SelectionParams params;
    params.v_sel = c.v_sel;
    params.k_merge = c.k_merge;
    params.n_fb = c.n_fb;
    params.mu = c.mu;
    params.scheme = c.kde_scheme;
    params.period = c.period;
    std::string out = "query_id\tvertical_id\tweight\tmerged\tlabel\n";
    for (const auto& topic : read_topics_file(o.topics)) {
        try {
            const auto selection =
                select_verticals(verticals, query_mle(tokenize(topic.text)), params, topic.query_time, topic.query_id);
            for (const auto& s : selection.selected) {
                out += topic.query_id + '\t' + std::to_string(s.vertical_id) + '\t' + format_fixed(s.weight, 6) + '\t' +
                       std::to_string(s.merged_count) + '\t' + verticals[s.position].label + '\n';
            }
        } catch (const EmptySelectionError& e) {
            d.warn(e.what());
        }
    }
    write_file_atomic(o.out, out);
    report(d);
}

void cmd_expand(const Options& o) {
    require(o.topics, "--topics");
    require(o.out, "--out");
    ExperimentConfig c = resolve_config(o);
    if (o.method.empty()) c.method = Method::rmt_e;
    if (c.method != Method::rm_e && c.method != Method::rmt_e && c.method != Method::full) {
        throw Error("expand supports --method rm-e, rmt-e or full");
    }
    Diagnostics d;
    Collections collections;
    collections.verticals = external_verticals(o, c, d);
    fs::create_directories(o.out);
    for (const auto& topic : read_topics_file(o.topics)) {
        SelectionParams params;
        params.v_sel = c.v_sel;
        params.k_merge = c.k_merge;
        params.n_fb = c.n_fb;
        params.mu = c.mu;
        params.scheme = c.kde_scheme;
        params.period = c.period;
        const QueryModel original = query_mle(tokenize(topic.text));
        std::map<std::string, double> terms = original;
        try {
            const auto selection = select_verticals(collections.verticals, original, params, topic.query_time, topic.query_id);
            const RelevanceModel rm =
                c.method == Method::rm_e
                    ? relevance_model_external(collections.verticals, selection, c.n_fb, c.n_terms)
                    : time_based_relevance_model(collections.verticals, selection, c.n_fb, c.n_terms);
            terms = interpolate_query(original, rm, c.lambda).final_model;
        } catch (const EmptySelectionError& e) {
            d.warn(std::string(e.what()) + "; query left unexpanded");
        }
        write_file_atomic((fs::path(o.out) / (topic.query_id + ".tsv")).string(), tsv_weights(terms));
    }
    report(d);
}

void cmd_search(const Options& o) {
    require(o.topics, "--topics");
    require(o.out, "--out");
    const ExperimentConfig c = resolve_config(o);
    Diagnostics d;
    const Collections collections = load_collections(o, c, d);
    std::optional<LTRModel> model;
    if (uses_model(c.method)) model = obtain_model(o, collections, c, d);
    RunFile run = run_topics(collections, read_topics_file(o.topics), c, model ? &*model : nullptr, &d);
    run.tag = "temporafed-" + std::string(method_name(c.method));
    write_file_atomic(o.out, write_run(run));
    if (!o.qrels.empty()) {
        const Qrels qrels = read_qrels_file(o.qrels);
        const auto timestamps = timestamps_of(collections.main);
        std::vector<std::string> ids;
        for (const auto& q : run.queries) ids.push_back(q.query_id);
        const auto metrics = evaluate(run, qrels, &timestamps, c.period, &ids);
        const std::string report_path = o.out + ".metrics.csv";
        write_file_atomic(report_path, write_report(metrics));
        std::cout << method_name(c.method) << " MAP " << format_fixed(metrics.map, 4) << " P30 "
                  << format_fixed(metrics.p30, 4) << " Rprec " << format_fixed(metrics.rprec, 4) << '\n';
    }
    report(d);
}

void cmd_train(const Options& o) {
    require(o.topics, "--topics");
    require(o.qrels, "--qrels");
    require(o.out, "--out");
    ExperimentConfig c = resolve_config(o);
    if (o.method.empty()) c.method = Method::full;
    Diagnostics d;
    const Collections collections = load_collections(o, c, d);
    const LTRModel model = train_model(collections, read_topics_file(o.topics), read_qrels_file(o.qrels), c, &d);
    write_file_atomic(o.out, write_model(model));
    write_file_atomic(o.log.empty() ? o.out + ".log.csv" : o.log, write_training_log(model));
    report(d);
    std::cout << "training MAP " << format_fixed(model.map_trace.back(), 4) << " after " << model.map_trace.size() - 1
              << " cycles\n";
}

void cmd_rerank(const Options& o) {
    require(o.topics, "--topics");
    require(o.run, "--run");
    require(o.out, "--out");
    ExperimentConfig c = resolve_config(o);
    if (o.method.empty()) c.method = Method::full;
    if (!uses_model(c.method)) throw Error("rerank supports --method ltr or full");
    Diagnostics d;
    const Collections collections = load_collections(o, c, d);
    const LTRModel model = obtain_model(o, collections, c, d);
    const RunFile input = read_run_file(o.run);
    std::map<std::string, const ScoredList*> lists;
    for (const auto& q : input.queries) lists[q.query_id] = &q;

    RunFile output;
    output.tag = input.tag.empty() ? "temporafed-rerank" : input.tag;
    for (const auto& topic : read_topics_file(o.topics)) {
        auto it = lists.find(topic.query_id);
        if (it == lists.end()) {
            d.warn("run has no list for query " + topic.query_id);
            continue;
        }
        QueryState state = prepare_query(collections, topic, c, &d);
        ScoredList candidates;
        candidates.query_id = topic.query_id;
        for (const auto& e : it->second->entries) {
            const auto internal = collections.main.find(e.doc_id);
            if (!internal) {
                d.warn("run document " + e.doc_id + " is not in the index");
                continue;
            }
            candidates.entries.push_back({e.doc_id, e.score, *internal});
        }
        state.candidates = std::move(candidates);
        const auto features = query_features(collections, state, c, &d);
        ScoredList ranked = rerank(model, state.candidates, features);
        if (ranked.entries.size() > c.k) ranked.entries.resize(c.k);
        output.queries.push_back(std::move(ranked));
    }
    write_file_atomic(o.out, write_run(output));
    report(d);
}

void cmd_evaluate(const Options& o) {
    require(o.run, "--run");
    require(o.qrels, "--qrels");
    const ExperimentConfig c = resolve_config(o);
    Diagnostics d;
    const RunFile run = read_run_file(o.run);
    const Qrels qrels = read_qrels_file(o.qrels);
    std::optional<TimestampLookup> timestamps;
    if (!o.index.empty() || !o.corpus.empty()) timestamps = timestamps_of(main_index(o, d));
    std::optional<std::vector<std::string>> ids;
    if (!o.topics.empty()) {
        ids.emplace();
        for (const auto& t : read_topics_file(o.topics)) ids->push_back(t.query_id);
    }
    const auto metrics = evaluate(run, qrels, timestamps ? &*timestamps : nullptr, c.period, ids ? &*ids : nullptr);
    const std::string text = write_report(metrics);
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(o.out, text);
    }
    for (const auto& w : metrics.warnings) d.warn(w);
    if (!o.baseline.empty()) {
        const auto base = evaluate(read_run_file(o.baseline), qrels, nullptr, c.period, ids ? &*ids : nullptr);
        std::map<std::string, double> base_ap;
        for (const auto& m : base.queries) base_ap[m.query_id] = m.ap;
        std::vector<double> a, b;
        for (const auto& m : metrics.queries) {
            a.push_back(m.ap);
            b.push_back(base_ap[m.query_id]);
        }
        const auto t = paired_ttest(a, b);
        std::cout << "paired t-test vs " << o.baseline << ": t=" << format_fixed(t.t, 4) << " p=" << format_fixed(t.p, 4)
                  << (t.degenerate ? " (zero variance)" : "") << '\n';
    }
    report(d);
}

void cmd_dump_density(const Options& o) {
    require(o.topics, "--topics");
    require(o.out, "--out");
    ExperimentConfig c = resolve_config(o);
    const bool external = o.source == "external";
    if (!external && o.source != "corpus") throw Error("--source must be corpus or external");
    c.method = external ? Method::kde_e : (c.kde_scheme == WeightScheme::score ? Method::kde_score : Method::kde_rank);
    Diagnostics d;
    const Collections collections = load_collections(o, c, d);
    Timestamp first = std::numeric_limits<Timestamp>::max();
    Timestamp last = std::numeric_limits<Timestamp>::min();
    for (const auto& doc : collections.main.documents()) {
        first = std::min(first, doc.timestamp);
        last = std::max(last, doc.timestamp);
    }
    const double step = o.step > 0.0 ? o.step : kSecondsPerHour;
    fs::create_directories(o.out);
    for (const auto& topic : read_topics_file(o.topics)) {
        const QueryState state = prepare_query(collections, topic, c, &d);
        if (external ? !state.selection : !state.corpus_density) {
            d.warn("no density for query " + topic.query_id);
            continue;
        }
        std::string csv = "t,density\n";
        for (double t = static_cast<double>(first); t <= static_cast<double>(last); t += step) {
            const double f = external ? external_temporal_relevance(*state.selection, t) : (*state.corpus_density)(t);
            char buffer[64];
            std::snprintf(buffer, sizeof buffer, "%.0f,%.6e\n", t, f);
            csv += buffer;
        }
        write_file_atomic((fs::path(o.out) / (topic.query_id + ".csv")).string(), csv);
    }
    report(d);
}

void cmd_synth(const Options& o) {
    require(o.out, "--out");
    SynthConfig s;
    const ExperimentConfig c = resolve_config(o);
    s.seed = c.seed;
    if (o.n_queries) s.n_queries = *o.n_queries;
    if (o.main_docs) s.main_docs = *o.main_docs;
    if (o.external_docs) s.external_docs = *o.external_docs;
    if (o.concentration) s.concentration = *o.concentration;
    const SynthCorpus corpus = generate(s);
    write_synth(corpus, o.out);
    std::cout << "wrote " << corpus.main.size() << " main and " << corpus.external.size() << " external posts, "
              << corpus.topics.size() << " topics\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporafed: time-aware federated microblog retrieval"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "key = value configuration file");
        sub->add_option("--set", o.set, "override one configuration key (key=value)");
        sub->add_option("--seed", o.seed, "root seed");
        sub->add_option("--out", o.out, "output path");
    };
    auto retrieval = [&](CLI::App* sub) {
        sub->add_option("--method", o.method, "lmdir|recency|kde-score|kde-rank|ltr|rm-e|rmt-e|kde-e|full");
        sub->add_option("--topics", o.topics, "topics TSV");
        sub->add_option("--qrels", o.qrels, "qrels file");
        sub->add_option("--corpus", o.corpus, "main corpus JSONL");
        sub->add_option("--index", o.index, "index directory written by `index`");
        sub->add_option("--external", o.external, "external corpus JSONL");
        sub->add_option("--verticals", o.verticals, "vertical directory written by `cluster`");
        sub->add_option("--accounts", o.accounts, "external account statistics CSV");
        sub->add_option("--model", o.model, "ranker model file");
        sub->add_option("--train-topics", o.train_topics, "topics used to train the ranker when no --model is given");
        sub->add_option("--k", o.k, "run length");
        sub->add_option("--depth", o.depth, "candidates per query");
        sub->add_option("--K", o.clusters, "number of verticals");
    };

    auto* index = app.add_subcommand("index", "ingest a corpus and write an index");
    common(index);
    index->add_option("--corpus", o.corpus, "corpus JSONL")->required();
    index->add_option("--accounts", o.accounts, "account statistics CSV");

    auto* cluster = app.add_subcommand("cluster", "cluster the external corpus into verticals");
    common(cluster);
    cluster->add_option("--external", o.external, "external corpus JSONL")->required();
    cluster->add_option("--accounts", o.accounts, "account statistics CSV");
    cluster->add_option("--K", o.clusters, "number of verticals");

    auto* select = app.add_subcommand("select", "select verticals per topic");
    auto* expand = app.add_subcommand("expand", "write expanded query models, one file per topic");
    auto* search = app.add_subcommand("search", "rank the main corpus and write a run file");
    auto* train = app.add_subcommand("train", "train the log-linear ranker by coordinate ascent");
    auto* rerank_cmd = app.add_subcommand("rerank", "re-rank an existing run with a trained ranker");
    auto* dump = app.add_subcommand("dump-density", "write per-topic temporal densities as CSV");
    for (auto* sub : {select, expand, search, train, rerank_cmd, dump}) {
        common(sub);
        retrieval(sub);
    }
    train->add_option("--log", o.log, "training log CSV (default <out>.log.csv)");
    rerank_cmd->add_option("--run", o.run, "run file to re-rank")->required();
    dump->add_option("--source", o.source, "corpus or external");
    dump->add_option("--step", o.step, "grid step in seconds (default one hour)");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "score a run against qrels");
    common(evaluate_cmd);
    evaluate_cmd->add_option("--run", o.run, "run file")->required();
    evaluate_cmd->add_option("--qrels", o.qrels, "qrels file")->required();
    evaluate_cmd->add_option("--topics", o.topics, "restrict to these topics");
    evaluate_cmd->add_option("--corpus", o.corpus, "corpus JSONL (enables EMD)");
    evaluate_cmd->add_option("--index", o.index, "index directory (enables EMD)");
    evaluate_cmd->add_option("--baseline", o.baseline, "second run for a paired t-test on AP");

    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
    common(synth);
    synth->add_option("--queries", o.n_queries, "evaluation topics");
    synth->add_option("--main-docs", o.main_docs, "main corpus size");
    synth->add_option("--external-docs", o.external_docs, "external corpus size");
    synth->add_option("--concentration", o.concentration, "share of relevant posts inside burst windows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*index) cmd_index(o);
        else if (*cluster) cmd_cluster(o);
        else if (*select) cmd_select(o);
        else if (*expand) cmd_expand(o);
        else if (*search) cmd_search(o);
        else if (*train) cmd_train(o);
        else if (*rerank_cmd) cmd_rerank(o);
        else if (*evaluate_cmd) cmd_evaluate(o);
        else if (*dump) cmd_dump_density(o);
        else if (*synth) cmd_synth(o);
    } catch (const std::exception& e) {
        std::cerr << "temporafed: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
