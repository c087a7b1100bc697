#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "temporafed/error.hpp"

namespace temporafed {

using Timestamp = std::int64_t;  // seconds since the Unix epoch, UTC

struct Metadata {
    std::uint32_t url_count = 0;
    std::uint32_t hashtag_count = 0;
    std::uint32_t mention_count = 0;
    bool is_reply = false;
    bool is_retweet = false;
    std::uint64_t statuses_count = 0;
    std::uint64_t followers_count = 0;
    std::uint32_t doc_length = 0;  // always tokens.size()

    bool operator==(const Metadata&) const = default;
};

struct Document {
    std::string doc_id;
    Timestamp timestamp = 0;
    std::string text;
    std::vector<std::string> tokens;
    Metadata metadata;
    std::string account_id;

    bool operator==(const Document&) const = default;
};

struct AccountStats {
    std::string account_id;
    double posts_per_day = 0.0;
    double reply_ratio = 0.0;
};

/// Immutable, ingestion-ordered collection of kept documents.
class Corpus {
  public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> documents);

    [[nodiscard]] const std::vector<Document>& documents() const noexcept { return documents_; }
    [[nodiscard]] std::size_t size() const noexcept { return documents_.size(); }
    [[nodiscard]] bool empty() const noexcept { return documents_.empty(); }
    /// [min timestamp, max timestamp]; {0, 0} for an empty corpus.
    [[nodiscard]] std::pair<Timestamp, Timestamp> time_span() const noexcept { return span_; }

    bool operator==(const Corpus& other) const { return documents_ == other.documents_; }

  private:
    std::vector<Document> documents_;
    std::pair<Timestamp, Timestamp> span_{0, 0};
};

// --- tokenization -----------------------------------------------------------

/// Lowercased, NFC-normalized terms. URLs, e-mail addresses, bare numbers,
/// clock times, @mentions and emoticons are removed; hashtags keep their
/// text without the leading '#'.
std::vector<std::string> tokenize(std::string_view text);

/// Raw URL / hashtag / mention counts of a post, before token removal.
struct SurfaceCounts {
    std::uint32_t urls = 0;
    std::uint32_t hashtags = 0;
    std::uint32_t mentions = 0;
};
SurfaceCounts count_surface_features(std::string_view text);

// --- filters (true = discard) -----------------------------------------------

bool filter_retweets(const Document& doc);

class LanguageClassifier {
  public:
    virtual ~LanguageClassifier() = default;
    /// Returns an ISO-639-1 label; may throw on failure.
    [[nodiscard]] virtual std::string classify(std::string_view text) const = 0;
};

/// Labels every text "en".
class EnglishOnlyClassifier final : public LanguageClassifier {
  public:
    [[nodiscard]] std::string classify(std::string_view) const override { return "en"; }
};

/// A classifier failure keeps the document and records a warning.
bool filter_language(const Document& doc, const LanguageClassifier& classifier,
                     Diagnostics* diagnostics = nullptr);

inline constexpr double kMinPostsPerDay = 10.0;
inline constexpr double kMaxReplyRatio = 1.0 / 3.0;

bool filter_account(const AccountStats& stats);

// --- ingestion --------------------------------------------------------------

struct IngestOptions {
    const LanguageClassifier* classifier = nullptr;  // nullptr: built-in "en" stub
    /// When set, documents whose account is listed and fails filter_account
    /// are discarded. Documents of unlisted accounts are kept.
    const std::map<std::string, AccountStats>* accounts = nullptr;
    std::string source_name = "<stream>";
};

/// Reads JSON Lines records (`id`, `timestamp`, `text`, optional account
/// fields). Throws EmptyCorpusError when nothing survives the filters.
Corpus ingest(std::istream& in, const IngestOptions& options = {}, Diagnostics* diagnostics = nullptr);
Corpus ingest_file(const std::string& path, const IngestOptions& options = {},
                   Diagnostics* diagnostics = nullptr);

/// CSV `account_id,posts_per_day,reply_ratio` with an optional header row.
std::map<std::string, AccountStats> read_account_stats(std::istream& in, const std::string& source_name);

/// Builds a Document (tokens and derived metadata) from raw fields.
Document make_document(std::string doc_id, Timestamp timestamp, std::string text, Metadata raw = {},
                       std::string account_id = {});

/// JSON Lines serialization of a document in the ingestion input format.
std::string to_json_line(const Document& doc);

}  // namespace temporafed
