#include "temporafed/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace temporafed {

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
    if (documents_.empty()) return;
    auto [lo, hi] = std::minmax_element(documents_.begin(), documents_.end(),
                                        [](const Document& a, const Document& b) { return a.timestamp < b.timestamp; });
    span_ = {lo->timestamp, hi->timestamp};
}

bool filter_retweets(const Document& doc) {
    if (doc.metadata.is_retweet) return true;
    std::string_view text = doc.text;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    return text.starts_with("RT ");
}

bool filter_language(const Document& doc, const LanguageClassifier& classifier, Diagnostics* diagnostics) {
    try {
        return classifier.classify(doc.text) != "en";
    } catch (const std::exception& e) {
        if (diagnostics) diagnostics->warn("language classifier failed on " + doc.doc_id + ": " + e.what());
        return false;
    }
}

bool filter_account(const AccountStats& stats) {
    return stats.posts_per_day < kMinPostsPerDay || stats.reply_ratio > kMaxReplyRatio;
}

Document make_document(std::string doc_id, Timestamp timestamp, std::string text, Metadata raw, std::string account_id) {
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.timestamp = timestamp;
    doc.tokens = tokenize(text);
    const SurfaceCounts surface = count_surface_features(text);
    doc.text = std::move(text);
    doc.metadata = raw;
    doc.metadata.url_count = surface.urls;
    doc.metadata.hashtag_count = surface.hashtags;
    doc.metadata.mention_count = surface.mentions;
    doc.metadata.doc_length = static_cast<std::uint32_t>(doc.tokens.size());
    doc.account_id = std::move(account_id);
    return doc;
}

namespace {

using nlohmann::json;

template <typename T>
T optional_unsigned(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return T{0};
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw std::invalid_argument(std::string("field '") + key + "' must be a non-negative integer");
    }
    return static_cast<T>(it->get<std::uint64_t>());
}

bool optional_bool(const json& record, const char* key) {
    auto it = record.find(key);
    if (it == record.end() || it->is_null()) return false;
    if (!it->is_boolean()) throw std::invalid_argument(std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
}

Document parse_record(const std::string& line) {
    const json record = json::parse(line);
    if (!record.is_object()) throw std::invalid_argument("record is not a JSON object");

    auto id = record.find("id");
    if (id == record.end()) throw std::invalid_argument("missing 'id'");
    std::string doc_id;
    if (id->is_string()) {
        doc_id = id->get<std::string>();
    } else if (id->is_number_integer()) {
        doc_id = id->dump();
    } else {
        throw std::invalid_argument("'id' must be a string or integer");
    }
    if (doc_id.empty()) throw std::invalid_argument("empty 'id'");

    auto ts = record.find("timestamp");
    if (ts == record.end() || !ts->is_number_integer()) throw std::invalid_argument("'timestamp' must be an integer");
    const auto timestamp = ts->get<std::int64_t>();
    if (timestamp < 0) throw std::invalid_argument("negative 'timestamp'");

    auto text = record.find("text");
    if (text == record.end() || !text->is_string()) throw std::invalid_argument("'text' must be a string");

    Metadata raw;
    raw.followers_count = optional_unsigned<std::uint64_t>(record, "followers_count");
    raw.statuses_count = optional_unsigned<std::uint64_t>(record, "statuses_count");
    raw.is_reply = optional_bool(record, "is_reply");
    raw.is_retweet = optional_bool(record, "is_retweet");

    std::string account;
    if (auto acc = record.find("account_id"); acc != record.end() && !acc->is_null()) {
        if (acc->is_string()) {
            account = acc->get<std::string>();
        } else if (acc->is_number_integer()) {
            account = acc->dump();
        } else {
            throw std::invalid_argument("'account_id' must be a string or integer");
        }
    }
    return make_document(std::move(doc_id), timestamp, text->get<std::string>(), raw, std::move(account));
}

}  // namespace

Corpus ingest(std::istream& in, const IngestOptions& options, Diagnostics* diagnostics) {
    static const EnglishOnlyClassifier default_classifier;
    const LanguageClassifier& classifier = options.classifier ? *options.classifier : default_classifier;

    std::vector<Document> kept;
    std::unordered_map<std::string, std::size_t> position;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Document doc;
        try {
            doc = parse_record(line);
        } catch (const std::exception& e) {
            if (diagnostics) {
                ++diagnostics->malformed_records;
                diagnostics->warn(options.source_name + ":" + std::to_string(line_no) + ": skipped malformed record: " + e.what());
            }
            continue;
        }
        if (filter_retweets(doc) || filter_language(doc, classifier, diagnostics)) continue;
        if (options.accounts && !doc.account_id.empty()) {
            auto it = options.accounts->find(doc.account_id);
            if (it != options.accounts->end() && filter_account(it->second)) continue;
        }
        if (auto it = position.find(doc.doc_id); it != position.end()) {
            if (diagnostics) {
                ++diagnostics->duplicate_ids;
                diagnostics->warn(options.source_name + ":" + std::to_string(line_no) + ": duplicate id " + doc.doc_id +
                                  " replaces earlier record");
            }
            kept[it->second] = std::move(doc);
            continue;
        }
        position.emplace(doc.doc_id, kept.size());
        kept.push_back(std::move(doc));
    }
    if (kept.empty()) throw EmptyCorpusError(options.source_name + ": no documents survived ingestion");
    return Corpus(std::move(kept));
}

Corpus ingest_file(const std::string& path, const IngestOptions& options, Diagnostics* diagnostics) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file " + path);
    IngestOptions named = options;
    named.source_name = path;
    return ingest(in, named, diagnostics);
}

std::map<std::string, AccountStats> read_account_stats(std::istream& in, const std::string& source_name) {
    std::map<std::string, AccountStats> stats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string field; std::getline(ss, field, ',');) fields.push_back(field);
        if (fields.size() != 3) throw ParseError(source_name, line_no, "expected account_id,posts_per_day,reply_ratio");
        if (line_no == 1 && fields[0] == "account_id") continue;
        AccountStats entry;
        entry.account_id = fields[0];
        try {
            std::size_t used = 0;
            entry.posts_per_day = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing characters");
            entry.reply_ratio = std::stod(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError(source_name, line_no, "non-numeric account statistic");
        }
        if (entry.posts_per_day < 0 || entry.reply_ratio < 0 || entry.reply_ratio > 1) {
            throw ParseError(source_name, line_no, "account statistic out of range");
        }
        stats[entry.account_id] = entry;
    }
    return stats;
}

std::string to_json_line(const Document& doc) {
    nlohmann::ordered_json record;
    record["id"] = doc.doc_id;
    record["timestamp"] = doc.timestamp;
    record["text"] = doc.text;
    record["followers_count"] = doc.metadata.followers_count;
    record["statuses_count"] = doc.metadata.statuses_count;
    record["is_reply"] = doc.metadata.is_reply;
    record["is_retweet"] = doc.metadata.is_retweet;
    if (!doc.account_id.empty()) record["account_id"] = doc.account_id;
    return record.dump();
}

}  // namespace temporafed
