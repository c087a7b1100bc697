#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "temporafed/io.hpp"
#include "temporafed/verticals.hpp"

namespace temporafed {

std::vector<Vertical> build_verticals(const std::vector<Document>& documents, const ClusterAssignment& assignment) {
    if (assignment.labels.size() != documents.size()) throw Error("cluster assignment does not match document count");
    std::map<std::uint32_t, std::vector<Document>> groups;
    for (std::size_t i = 0; i < documents.size(); ++i) groups[assignment.labels[i]].push_back(documents[i]);
    std::vector<Vertical> verticals;
    verticals.reserve(groups.size());
    for (auto& [id, docs] : groups) {
        Vertical v;
        v.id = id;
        v.label = id < assignment.label_terms.size() ? assignment.label_terms[id] : std::string{};
        v.index = Index::build(std::move(docs));
        verticals.push_back(std::move(v));
    }
    return verticals;
}

void save_verticals(const std::string& directory, const std::vector<Vertical>& verticals) {
    std::filesystem::create_directories(directory + "/verticals");
    std::string csv = "doc_id,vertical_id\n";
    std::string labels = "vertical_id\tlabel\tdoc_count\n";
    for (const auto& v : verticals) {
        for (const auto& d : v.index.documents()) csv += d.doc_id + ',' + std::to_string(v.id) + '\n';
        labels += std::to_string(v.id) + '\t' + v.label + '\t' + std::to_string(v.index.doc_count()) + '\n';
        v.index.save(directory + "/verticals/" + std::to_string(v.id));
    }
    write_file_atomic(directory + "/assignment.csv", csv);
    write_file_atomic(directory + "/labels.tsv", labels);
}

std::vector<Vertical> load_verticals(const std::string& directory) {
    const std::string labels_path = directory + "/labels.tsv";
    std::ifstream in(labels_path);
    if (!in) throw Error("cannot open " + labels_path);
    std::vector<Vertical> verticals;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        std::stringstream ss(line);
        std::string id_text;
        std::string label;
        std::getline(ss, id_text, '\t');
        std::getline(ss, label, '\t');
        Vertical v;
        try {
            v.id = static_cast<std::uint32_t>(std::stoul(id_text));
        } catch (const std::exception&) {
            throw ParseError(labels_path, line_no, "bad vertical id '" + id_text + "'");
        }
        v.label = label;
        v.index = Index::load(directory + "/verticals/" + id_text);
        verticals.push_back(std::move(v));
    }
    if (verticals.empty()) throw Error(labels_path + ": no verticals");
    return verticals;
}

std::vector<std::size_t> preselect_verticals(const std::vector<Vertical>& verticals, const QueryModel& query,
                                             std::size_t v_sel, double mu) {
    if (v_sel == 0) throw Error("v_sel must be at least 1");
    double global_total = 0.0;
    for (const auto& v : verticals) global_total += static_cast<double>(v.index.total_terms());

    std::map<std::string, double> global_cf;
    for (const auto& [term, weight] : query) {
        double cf = 0.0;
        for (const auto& v : verticals) cf += static_cast<double>(v.index.cf(term));
        global_cf[term] = cf;
    }

    struct Ranked {
        std::size_t position;
        bool overlaps;
        double score;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(verticals.size());
    for (std::size_t i = 0; i < verticals.size(); ++i) {
        const Index& index = verticals[i].index;
        const double size = static_cast<double>(index.total_terms());
        bool overlaps = false;
        double score = 0.0;
        for (const auto& [term, weight] : query) {
            const double background = global_cf[term] / global_total;
            if (background <= 0.0 || weight == 0.0) continue;
            const double cf = static_cast<double>(index.cf(term));
            overlaps = overlaps || cf > 0.0;
            score += weight * std::log((cf + mu * background) / (size + mu));
        }
        ranked.push_back({i, overlaps, score});
    }
    std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
        if (a.overlaps != b.overlaps) return a.overlaps;
        if (a.score != b.score) return a.score > b.score;
        return verticals[a.position].id < verticals[b.position].id;
    });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(v_sel, ranked.size()); ++i) out.push_back(ranked[i].position);
    return out;
}

VerticalFeedback vertical_temporal_density(const Vertical& vertical, const QueryModel& query, std::size_t n_fb,
                                           WeightScheme scheme, double mu, Timestamp query_time, double period) {
    if (n_fb == 0) throw Error("n_fb must be at least 1");
    ScorerParams scorer;
    scorer.mu = mu;
    ScoredList docs = search(vertical.index, query, scorer, n_fb, query_time);
    if (docs.entries.empty()) {
        throw DegenerateSampleError("vertical " + std::to_string(vertical.id) + " returned no feedback documents");
    }
    TemporalDensity density = fit_feedback_density(vertical.index, docs, scheme, period);
    return {std::move(docs), std::move(density)};
}

VerticalSelection select_verticals(const std::vector<Vertical>& verticals, const QueryModel& query,
                                   const SelectionParams& params, Timestamp query_time, std::string query_id) {
    if (params.v_sel == 0) throw Error("v_sel must be at least 1");
    if (params.k_merge < params.v_sel) throw Error("k_merge must be at least v_sel");
    if (params.n_fb == 0) throw Error("n_fb must be at least 1");

    const auto kept = preselect_verticals(verticals, query, params.v_sel, params.mu);
    ScorerParams scorer;
    scorer.mu = params.mu;
    const std::size_t depth = std::max(params.k_merge, params.n_fb);

    struct Merged {
        double score;
        std::uint32_t vertical_id;
        std::string doc_id;
        std::size_t slot;
    };
    std::vector<ScoredList> lists;
    std::vector<Merged> merged;
    for (std::size_t slot = 0; slot < kept.size(); ++slot) {
        const Vertical& v = verticals[kept[slot]];
        lists.push_back(search(v.index, query, scorer, depth, query_time, query_id));
        const auto& entries = lists.back().entries;
        for (std::size_t i = 0; i < std::min(params.k_merge, entries.size()); ++i) {
            merged.push_back({entries[i].score, v.id, entries[i].doc_id, slot});
        }
    }
    std::sort(merged.begin(), merged.end(), [](const Merged& a, const Merged& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.vertical_id != b.vertical_id) return a.vertical_id < b.vertical_id;
        return a.doc_id < b.doc_id;
    });
    if (merged.size() > params.k_merge) merged.resize(params.k_merge);
    if (merged.empty()) throw EmptySelectionError("no vertical returned a document for query " + query_id);

    std::vector<std::size_t> counts(kept.size(), 0);
    for (const auto& m : merged) ++counts[m.slot];

    VerticalSelection selection;
    selection.query_id = std::move(query_id);
    selection.merged_total = merged.size();
    for (std::size_t slot = 0; slot < kept.size(); ++slot) {
        if (counts[slot] == 0) continue;  // dropped; remaining weights still sum to one
        const Vertical& v = verticals[kept[slot]];
        SelectedVertical entry;
        entry.vertical_id = v.id;
        entry.position = kept[slot];
        entry.merged_count = counts[slot];
        entry.weight = static_cast<double>(counts[slot]) / static_cast<double>(merged.size());
        entry.feedback.query_id = selection.query_id;
        const auto& entries = lists[slot].entries;
        entry.feedback.entries.assign(entries.begin(),
                                      entries.begin() + static_cast<std::ptrdiff_t>(std::min(params.n_fb, entries.size())));
        entry.density = fit_feedback_density(v.index, entry.feedback, params.scheme, params.period);
        selection.selected.push_back(std::move(entry));
    }
    return selection;
}

double external_temporal_relevance(const VerticalSelection& selection, double t) {
    double total = 0.0;
    for (const auto& s : selection.selected) {
        if (s.density) total += (*s.density)(t) * s.weight;
    }
    return total;
}

}  // namespace temporafed
