#include <algorithm>
#include <filesystem>
#include <fstream>

#include "temporafed/io.hpp"
#include "temporafed/retrieval.hpp"

namespace temporafed {

QueryModel query_counts(const std::vector<std::string>& terms) {
    QueryModel model;
    for (const auto& term : terms) model[term] += 1.0;
    return model;
}

Index Index::build(const Corpus& corpus) {
    if (corpus.empty()) throw EmptyCorpusError("cannot index an empty corpus");
    return build(corpus.documents());
}

Index Index::build(std::vector<Document> documents) {
    if (documents.empty()) throw EmptyCorpusError("cannot index an empty corpus");
    Index index;
    index.documents_ = std::move(documents);
    index.doc_ids_.reserve(index.documents_.size());
    std::unordered_map<TermId, std::uint32_t> counts;
    for (InternalId doc = 0; doc < index.documents_.size(); ++doc) {
        const Document& d = index.documents_[doc];
        if (!index.doc_ids_.emplace(d.doc_id, doc).second) {
            throw Error("duplicate doc_id in index input: " + d.doc_id);
        }
        counts.clear();
        // first-occurrence order keeps term ids deterministic
        std::vector<TermId> order;
        for (const auto& token : d.tokens) {
            auto [it, inserted] = index.term_ids_.try_emplace(token, static_cast<TermId>(index.terms_.size()));
            if (inserted) {
                index.terms_.push_back(token);
                index.postings_.emplace_back();
                index.cf_.push_back(0);
            }
            if (counts[it->second]++ == 0) order.push_back(it->second);
        }
        for (TermId term : order) {
            const std::uint32_t tf = counts[term];
            index.postings_[term].push_back({doc, tf});
            index.cf_[term] += tf;
        }
        index.total_terms_ += d.tokens.size();
    }
    return index;
}

std::optional<TermId> Index::term_id(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    if (it == term_ids_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Index::cf(std::string_view term) const {
    auto id = term_id(term);
    return id ? cf_[*id] : 0;
}

std::uint32_t Index::df(std::string_view term) const {
    auto id = term_id(term);
    return id ? df(*id) : 0;
}

std::uint32_t Index::tf(TermId id, InternalId doc) const {
    const auto& list = postings_[id];
    auto it = std::lower_bound(list.begin(), list.end(), doc, [](const Posting& p, InternalId d) { return p.doc < d; });
    return (it != list.end() && it->doc == doc) ? it->tf : 0;
}

std::optional<InternalId> Index::find(std::string_view doc_id) const {
    auto it = doc_ids_.find(std::string(doc_id));
    if (it == doc_ids_.end()) return std::nullopt;
    return it->second;
}

void Index::save(const std::string& directory) const {
    std::filesystem::create_directories(directory);
    std::string docs;
    for (const auto& d : documents_) {
        docs += to_json_line(d);
        docs += '\n';
    }
    write_file_atomic(directory + "/documents.jsonl", docs);

    std::string stats = "term\tcf\tdf\n";
    for (TermId t = 0; t < terms_.size(); ++t) {
        stats += terms_[t] + '\t' + std::to_string(cf_[t]) + '\t' + std::to_string(df(t)) + '\n';
    }
    write_file_atomic(directory + "/terms.tsv", stats);
    write_file_atomic(directory + "/manifest.txt", "doc_count = " + std::to_string(doc_count()) +
                                                       "\ntotal_terms = " + std::to_string(total_terms_) +
                                                       "\nvocabulary = " + std::to_string(terms_.size()) + "\n");
}

Index Index::load(const std::string& directory) {
    const std::string path = directory + "/documents.jsonl";
    std::ifstream in(path);
    if (!in) throw Error("cannot open index file " + path);
    IngestOptions options;
    options.source_name = path;
    Diagnostics diagnostics;
    Corpus corpus = ingest(in, options, &diagnostics);
    if (diagnostics.malformed_records > 0) {
        throw Error(path + ": corrupt index (" + std::to_string(diagnostics.malformed_records) + " malformed records)");
    }
    return build(corpus);
}

}  // namespace temporafed
