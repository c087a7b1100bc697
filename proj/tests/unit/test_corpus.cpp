#include <doctest.h>

#include <sstream>

#include "support.hpp"
#include "temporafed/corpus.hpp"

using namespace temporafed;

namespace {

using Tokens = std::vector<std::string>;

class FixedClassifier : public LanguageClassifier {
  public:
    explicit FixedClassifier(std::string label) : label_(std::move(label)) {}
    std::string classify(std::string_view) const override { return label_; }

  private:
    std::string label_;
};

class BrokenClassifier : public LanguageClassifier {
  public:
    std::string classify(std::string_view) const override { throw std::runtime_error("model not loaded"); }
};

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("tokenize lowercases and splits on whitespace") {
    CHECK(tokenize("Argo wins Oscar") == Tokens{"argo", "wins", "oscar"});
    CHECK(tokenize("") == Tokens{});
    CHECK(tokenize("   \t\n ") == Tokens{});
}

TEST_CASE("tokenize drops urls, mentions and hashtag marks") {
    CHECK(tokenize("see http://t.co/x #oscars") == Tokens{"see", "oscars"});
    CHECK(tokenize("@bob check www.example.com/page now") == Tokens{"check", "now"});
    CHECK(tokenize("mail me at someone@example.org") == Tokens{"mail", "me", "at"});
    CHECK(tokenize("news.bbc.co.uk/sport live") == Tokens{"live"});
}

TEST_CASE("tokenize drops numbers, clock times and emoticons") {
    CHECK(tokenize("meet at 10:30 or 5pm, 2013 tickets :) ;-) <3") == Tokens{"meet", "at", "or", "tickets"});
    CHECK(tokenize("game 7 tonight :D") == Tokens{"game", "tonight"});
}

TEST_CASE("tokenize keeps inner apostrophes and trims punctuation") {
    CHECK(tokenize("Don't stop... \"believing\"!") == Tokens{"don't", "stop", "believing"});
    CHECK(tokenize("state-of-the-art") == Tokens{"state", "of", "the", "art"});
}

TEST_CASE("tokenize normalizes unicode case and composition") {
    // decomposed e + combining acute, then upper-case composed
    CHECK(tokenize("Cafe\xCC\x81 CAF\xC3\x89") == Tokens{"caf\xC3\xA9", "caf\xC3\xA9"});
    CHECK(tokenize("\xC3\x9C" "BER") == Tokens{"\xC3\xBC" "ber"});
}

TEST_CASE("surface counts see the raw post") {
    const auto c = count_surface_features("@a @b see http://t.co/x and #one #two #three");
    CHECK(c.mentions == 2);
    CHECK(c.urls == 1);
    CHECK(c.hashtags == 3);
}

TEST_CASE("make_document derives metadata") {
    Metadata raw;
    raw.followers_count = 10;
    raw.is_reply = true;
    const Document d = make_document("7", 5, "@x hello #world http://t.co/a", raw, "acct");
    CHECK(d.tokens == Tokens{"hello", "world"});
    CHECK(d.metadata.doc_length == 2);
    CHECK(d.metadata.url_count == 1);
    CHECK(d.metadata.hashtag_count == 1);
    CHECK(d.metadata.mention_count == 1);
    CHECK(d.metadata.followers_count == 10);
    CHECK(d.metadata.is_reply);
    CHECK(d.account_id == "acct");
}

TEST_CASE("retweet filter") {
    Metadata rt;
    rt.is_retweet = true;
    CHECK(filter_retweets(make_document("1", 0, "plain words", rt)));
    CHECK(filter_retweets(make_document("2", 0, "RT @abc news of the day")));
    CHECK(filter_retweets(make_document("3", 0, "  RT @abc leading space")));
    CHECK_FALSE(filter_retweets(make_document("4", 0, "an ordinary tweet")));
    CHECK_FALSE(filter_retweets(make_document("5", 0, "ART show tonight")));
}

TEST_CASE("language filter") {
    const Document d = make_document("1", 0, "hello");
    CHECK_FALSE(filter_language(d, FixedClassifier("en")));
    CHECK(filter_language(d, FixedClassifier("pt")));
    Diagnostics diag;
    CHECK_FALSE(filter_language(d, BrokenClassifier(), &diag));
    CHECK(diag.warnings.size() == 1);
}

TEST_CASE("account filter thresholds") {
    CHECK(filter_account({"a", 5.0, 0.1}));
    CHECK(filter_account({"b", 50.0, 0.5}));
    CHECK_FALSE(filter_account({"c", 50.0, 0.1}));
    CHECK_FALSE(filter_account({"d", 10.0, 1.0 / 3.0}));
}

TEST_CASE("ingest applies filters and counts malformed records") {
    std::istringstream in(R"({"id":"1","timestamp":100,"text":"first post"}
{"id":2,"timestamp":200,"text":"second post","is_reply":true}
{"id":"3","timestamp":300,"text":"RT @x copied"}
not json at all
{"id":"4","timestamp":-5,"text":"negative time"}
{"id":"5","text":"no time"}

{"id":"6","timestamp":400,"text":"third post","is_retweet":false,"followers_count":12}
)");
    Diagnostics diag;
    const Corpus corpus = ingest(in, {}, &diag);
    REQUIRE(corpus.size() == 3);
    CHECK(corpus.documents()[0].doc_id == "1");
    CHECK(corpus.documents()[1].doc_id == "2");
    CHECK(corpus.documents()[1].metadata.is_reply);
    CHECK(corpus.documents()[2].metadata.followers_count == 12);
    CHECK(diag.malformed_records == 3);
    CHECK(corpus.time_span() == std::pair<Timestamp, Timestamp>{100, 400});
}

TEST_CASE("ingest keeps the last record of a duplicated id in place") {
    std::istringstream in(R"({"id":"1","timestamp":100,"text":"old"}
{"id":"2","timestamp":150,"text":"other"}
{"id":"1","timestamp":120,"text":"new"})");
    Diagnostics diag;
    const Corpus corpus = ingest(in, {}, &diag);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus.documents()[0].text == "new");
    CHECK(diag.duplicate_ids == 1);
}

TEST_CASE("ingest drops posts of filtered accounts") {
    std::istringstream stats_in("account_id,posts_per_day,reply_ratio\nquiet,2,0.0\nbusy,40,0.1\n");
    const auto stats = read_account_stats(stats_in, "stats.csv");
    IngestOptions options;
    options.accounts = &stats;
    std::istringstream in(R"({"id":"1","timestamp":1,"text":"a","account_id":"quiet"}
{"id":"2","timestamp":2,"text":"b","account_id":"busy"}
{"id":"3","timestamp":3,"text":"c","account_id":"unknown"})");
    const Corpus corpus = ingest(in, options);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus.documents()[0].doc_id == "2");
}

TEST_CASE("ingest of a fully filtered stream is an error") {
    std::istringstream in("{\"id\":\"1\",\"timestamp\":1,\"text\":\"RT @a b\"}\n");
    CHECK_THROWS_AS(ingest(in), EmptyCorpusError);
    std::istringstream empty("");
    CHECK_THROWS_AS(ingest(empty), EmptyCorpusError);
}

TEST_CASE("serialized documents ingest back unchanged") {
    Metadata raw;
    raw.followers_count = 99;
    raw.statuses_count = 1234;
    raw.is_reply = true;
    const Document d = make_document("42", 1359676800, "Caf\xC3\xA9 \"quoted\" #tag http://t.co/z", raw, "acct");
    std::istringstream in(to_json_line(d) + "\n");
    const Corpus corpus = ingest(in);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.documents()[0] == d);
}

TEST_CASE("account statistics parse errors name the line") {
    std::istringstream in("a,12,0.1\nb,twelve,0.1\n");
    try {
        read_account_stats(in, "accounts.csv");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("accounts.csv:2") == 0);
    }
}

}  // TEST_SUITE
