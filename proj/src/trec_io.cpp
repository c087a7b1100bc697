#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "temporafed/eval.hpp"
#include "temporafed/io.hpp"

namespace temporafed {

namespace {

std::vector<std::string> split_whitespace(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    for (std::string f; ss >> f;) fields.push_back(f);
    return fields;
}

template <typename T>
bool parse_integer(const std::string& text, T& value) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_double(const std::string& text, double& value) {
    try {
        std::size_t used = 0;
        value = std::stod(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

}  // namespace

std::vector<Topic> read_topics(std::istream& in, const std::string& source_name) {
    std::vector<Topic> topics;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
            fields.push_back(line.substr(start, tab - start));
        }
        fields.push_back(line.substr(start));
        if (fields.size() != 3 || fields[2].empty()) {
            throw ParseError(source_name, line_no, "expected query_id<TAB>text<TAB>query_time");
        }
        Topic t;
        t.query_id = fields[0];
        t.text = fields[1];
        if (t.query_id.empty()) throw ParseError(source_name, line_no, "empty query_id");
        if (!parse_integer(fields[2], t.query_time) || t.query_time < 0) {
            throw ParseError(source_name, line_no, "query_time must be non-negative epoch seconds");
        }
        if (!seen.insert(t.query_id).second) throw ParseError(source_name, line_no, "duplicate query_id " + t.query_id);
        topics.push_back(std::move(t));
    }
    return topics;
}

std::vector<Topic> read_topics_file(const std::string& path) {
    auto in = open(path);
    return read_topics(in, path);
}

std::string write_topics(const std::vector<Topic>& topics) {
    std::string out;
    for (const auto& t : topics) out += t.query_id + '\t' + t.text + '\t' + std::to_string(t.query_time) + '\n';
    return out;
}

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0 || grade > 2) throw Error("relevance grade out of range");
    judgments_[query_id][doc_id] = grade;
}

int Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = judgments_.find(query_id);
    if (q == judgments_.end()) return 0;
    auto d = q->second.find(doc_id);
    return d == q->second.end() ? 0 : d->second;
}

std::size_t Qrels::relevant_count(const std::string& query_id) const {
    auto q = judgments_.find(query_id);
    if (q == judgments_.end()) return 0;
    std::size_t n = 0;
    for (const auto& [doc, grade] : q->second) n += grade >= 1 ? 1 : 0;
    return n;
}

std::vector<std::string> Qrels::relevant_docs(const std::string& query_id) const {
    std::vector<std::string> docs;
    auto q = judgments_.find(query_id);
    if (q == judgments_.end()) return docs;
    for (const auto& [doc, grade] : q->second) {
        if (grade >= 1) docs.push_back(doc);
    }
    return docs;
}

std::vector<std::string> Qrels::query_ids() const {
    std::vector<std::string> ids;
    for (const auto& [q, docs] : judgments_) ids.push_back(q);
    return ids;
}

Qrels read_qrels(std::istream& in, const std::string& source_name) {
    Qrels qrels;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() != 4) throw ParseError(source_name, line_no, "expected 'query_id 0 doc_id grade'");
        int grade = 0;
        if (!parse_integer(fields[3], grade) || grade < 0 || grade > 2) {
            throw ParseError(source_name, line_no, "grade must be 0, 1 or 2");
        }
        if (!seen.emplace(fields[0], fields[2]).second) {
            throw ParseError(source_name, line_no, "duplicate judgment for " + fields[0] + "/" + fields[2]);
        }
        qrels.set(fields[0], fields[2], grade);
    }
    return qrels;
}

Qrels read_qrels_file(const std::string& path) {
    auto in = open(path);
    return read_qrels(in, path);
}

std::string write_qrels(const Qrels& qrels) {
    std::string out;
    for (const auto& [q, docs] : qrels.judgments()) {
        for (const auto& [doc, grade] : docs) out += q + " 0 " + doc + ' ' + std::to_string(grade) + '\n';
    }
    return out;
}

RunFile read_run(std::istream& in, const std::string& source_name) {
    RunFile run;
    std::map<std::string, std::size_t> position;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() != 6 || fields[1] != "Q0") {
            throw ParseError(source_name, line_no, "expected 'query_id Q0 doc_id rank score tag'");
        }
        std::size_t rank = 0;
        double score = 0.0;
        if (!parse_integer(fields[3], rank) || rank == 0) throw ParseError(source_name, line_no, "bad rank");
        if (!parse_double(fields[4], score)) throw ParseError(source_name, line_no, "bad score");
        if (run.tag.empty()) {
            run.tag = fields[5];
        } else if (run.tag != fields[5]) {
            throw ParseError(source_name, line_no, "mixed run tags");
        }
        auto [it, inserted] = position.try_emplace(fields[0], run.queries.size());
        if (inserted) run.queries.push_back({fields[0], {}});
        auto& entries = run.queries[it->second].entries;
        if (rank != entries.size() + 1) throw ParseError(source_name, line_no, "ranks must be consecutive from 1");
        if (!entries.empty() && score > entries.back().score) {
            throw ParseError(source_name, line_no, "scores must be non-increasing");
        }
        entries.push_back({fields[2], score, 0});
    }
    return run;
}

RunFile read_run_file(const std::string& path) {
    auto in = open(path);
    return read_run(in, path);
}

std::string write_run(const RunFile& run) {
    const std::string tag = run.tag.empty() ? "temporafed" : run.tag;
    std::string out;
    for (const auto& q : run.queries) {
        for (std::size_t i = 0; i < q.entries.size(); ++i) {
            out += q.query_id + " Q0 " + q.entries[i].doc_id + ' ' + std::to_string(i + 1) + ' ' +
                   format_fixed(q.entries[i].score, 6) + ' ' + tag + '\n';
        }
    }
    return out;
}

}  // namespace temporafed
