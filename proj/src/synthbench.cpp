#include "temporafed/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "temporafed/io.hpp"
#include "temporafed/random.hpp"

namespace temporafed {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kTopicCoreTerms = 3;
constexpr std::size_t kTopicTerms = 6;
constexpr std::size_t kBurstTerms = 5;
constexpr std::size_t kStaleTerms = 5;
constexpr std::size_t kBackgroundTopicTerms = 8;
constexpr std::size_t kAccounts = 2000;

struct TopicPlan {
    std::string query_id;
    std::vector<std::string> core;
    std::vector<std::string> topical;
    std::vector<std::string> stale;
    std::vector<std::pair<Timestamp, Timestamp>> windows;
    std::vector<std::vector<std::string>> burst;  // per window
    std::size_t relevant = 0;
};

// Background unigram model with Zipfian frequencies.
class Background {
  public:
    explicit Background(std::size_t vocabulary) : cdf_(vocabulary) {
        double total = 0.0;
        for (std::size_t i = 0; i < vocabulary; ++i) {
            total += 1.0 / static_cast<double>(i + 1);
            cdf_[i] = total;
        }
        for (auto& c : cdf_) c /= total;
    }

    std::string draw(Rng& rng) const {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return synth_word(std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1));
    }

  private:
    std::vector<double> cdf_;
};

const std::string& pick(Rng& rng, const std::vector<std::string>& words) { return words[rng.index(words.size())]; }

// Between lo and hi distinct words from `words`.
void add_some(Rng& rng, const std::vector<std::string>& words, std::size_t lo, std::size_t hi,
              std::vector<std::string>& out) {
    const auto n = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
    std::vector<std::string> pool = words;
    for (std::size_t i = 0; i < n && !pool.empty(); ++i) {
        const auto j = rng.index(pool.size());
        out.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
}

void add_background(Rng& rng, const Background& background, std::size_t lo, std::size_t hi,
                    std::vector<std::string>& out) {
    const auto n = rng.integer(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
    for (std::int64_t i = 0; i < n; ++i) out.push_back(background.draw(rng));
}

// Shuffled words plus optional post decorations.
std::string compose(Rng& rng, std::vector<std::string> words, double url_rate) {
    for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.index(i)]);
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) text += ' ';
        if (rng.bernoulli(0.05)) text += '#';
        text += words[i];
    }
    if (rng.bernoulli(0.1)) text = "@" + synth_word(rng.index(kAccounts)) + ' ' + text;
    if (rng.bernoulli(url_rate)) text += " http://t.co/" + synth_word(rng.index(100000));
    return text;
}

Timestamp in_window(Rng& rng, std::pair<Timestamp, Timestamp> window) {
    const double lo = static_cast<double>(window.first);
    const double hi = static_cast<double>(window.second);
    const double mid = 0.5 * (lo + hi);
    const double sigma = (hi - lo) / 4.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double t = mid + sigma * rng.normal();
        if (t >= lo && t < hi) return static_cast<Timestamp>(std::floor(t));
    }
    return static_cast<Timestamp>(mid);
}

Timestamp uniform_time(Rng& rng, Timestamp start, Timestamp end) {
    return rng.integer(start, end - 1);
}

struct Draft {
    Timestamp timestamp = 0;
    std::string text;
    Metadata raw;
    std::string account;
    std::string topic;  // query id for judged posts
    int grade = -1;     // -1: unjudged
};

Metadata account_metadata(Rng& rng, double reply_rate) {
    Metadata m;
    m.followers_count = static_cast<std::int64_t>(std::exp(rng.uniform(std::log(10.0), std::log(100000.0))));
    m.statuses_count = static_cast<std::int64_t>(std::exp(rng.uniform(std::log(100.0), std::log(100000.0))));
    m.is_reply = rng.bernoulli(reply_rate);
    return m;
}

}  // namespace

std::string synth_word(std::size_t i) {
    const std::size_t base = kConsonants.size() * kVowels.size();
    std::string word;
    for (int s = 0; s < 3; ++s) {
        const std::size_t syllable = i % base;
        i /= base;
        word += kConsonants[syllable / kVowels.size()];
        word += kVowels[syllable % kVowels.size()];
    }
    return word;
}

void validate(const SynthConfig& c) {
    if (c.n_queries == 0) throw Error("synthetic benchmark needs at least one query");
    if (!(c.concentration > 0.0 && c.concentration <= 1.0)) throw Error("burst concentration must lie in (0, 1]");
    if (!(c.external_concentration > 0.0 && c.external_concentration <= 1.0)) {
        throw Error("external burst concentration must lie in (0, 1]");
    }
    if (!(c.span_days > 0.0)) throw Error("time span must be positive");
    if (!(c.burst_days > 0.0) || c.burst_days > c.span_days) throw Error("burst windows must fit inside the time span");
    if (c.min_bursts == 0 || c.min_bursts > c.max_bursts) throw Error("burst count range is empty");
    if (static_cast<double>(c.max_bursts) * c.burst_days > c.span_days) {
        throw Error("burst windows of one topic cannot be placed without overlap");
    }
    if (c.min_relevant == 0 || c.min_relevant > c.max_relevant) throw Error("relevant count range is empty");
    if (c.noise_rate < 0.0 || c.retweet_rate < 0.0 || c.retweet_rate > 1.0) throw Error("rates out of range");
    if (c.vocabulary < 100) throw Error("background vocabulary must have at least 100 words");
    const std::size_t topics = c.n_queries + c.n_train_queries;
    const std::size_t reserved =
        c.vocabulary + topics * (kTopicCoreTerms + kTopicTerms + kStaleTerms + c.max_bursts * kBurstTerms) +
        c.external_topics * kBackgroundTopicTerms;
    if (reserved > 70 * 70 * 70) throw Error("vocabulary exceeds the synthetic word space");
    const double worst_main = static_cast<double>(topics * c.max_relevant) * (1.0 + c.noise_rate);
    if (worst_main > static_cast<double>(c.main_docs)) throw Error("main corpus too small for the planted topics");
    if (topics * c.external_per_topic > c.external_docs) throw Error("external corpus too small for the planted topics");
    if (c.external_docs > topics * c.external_per_topic && c.external_topics == 0) {
        throw Error("external background posts need at least one external topic");
    }
}

SynthCorpus generate(const SynthConfig& c) {
    validate(c);
    Rng root(c.seed);
    Rng plan_rng = root.fork(1);
    Rng main_rng = root.fork(2);
    Rng external_rng = root.fork(3);

    const Timestamp start = c.start;
    const auto span = static_cast<Timestamp>(c.span_days * kSecondsPerDay);
    const Timestamp end = start + span;
    const auto width = static_cast<Timestamp>(c.burst_days * kSecondsPerDay);
    const Background background(c.vocabulary);

    std::size_t next_word = c.vocabulary;
    auto words = [&](std::size_t n) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(synth_word(next_word++));
        return out;
    };

    std::vector<TopicPlan> plans;
    SynthCorpus out;
    const std::size_t topics = c.n_queries + c.n_train_queries;
    for (std::size_t q = 0; q < topics; ++q) {
        TopicPlan p;
        const bool train = q >= c.n_queries;
        const std::size_t number = train ? q - c.n_queries + 1 : q + 1;
        p.query_id = (train ? "ST" : "SQ") + std::string(number < 10 ? "00" : number < 100 ? "0" : "") +
                     std::to_string(number);
        p.core = words(kTopicCoreTerms);
        p.topical = words(kTopicTerms);
        p.stale = words(kStaleTerms);
        const auto bursts = static_cast<std::size_t>(plan_rng.integer(static_cast<std::int64_t>(c.min_bursts),
                                                                      static_cast<std::int64_t>(c.max_bursts)));
        while (p.windows.size() < bursts) {
            const Timestamp begin = plan_rng.integer(start, end - width);
            bool overlaps = false;
            for (const auto& w : p.windows) overlaps = overlaps || (begin < w.second && w.first < begin + width);
            if (!overlaps) p.windows.emplace_back(begin, begin + width);
        }
        std::sort(p.windows.begin(), p.windows.end());
        for (std::size_t w = 0; w < bursts; ++w) p.burst.push_back(words(kBurstTerms));
        p.relevant = static_cast<std::size_t>(plan_rng.integer(static_cast<std::int64_t>(c.min_relevant),
                                                               static_cast<std::int64_t>(c.max_relevant)));

        Topic topic{p.query_id, {}, end};
        for (std::size_t i = 0; i < p.core.size(); ++i) topic.text += (i ? " " : "") + p.core[i];
        (train ? out.train_topics : out.topics).push_back(topic);
        for (const auto& w : p.windows) out.bursts.push_back({p.query_id, w.first, w.second});
        auto& terms = out.burst_terms[p.query_id];
        for (const auto& b : p.burst) terms.insert(terms.end(), b.begin(), b.end());
        plans.push_back(std::move(p));
    }

    // main collection
    std::vector<Draft> main;
    for (const auto& p : plans) {
        for (std::size_t i = 0; i < p.relevant; ++i) {
            Draft d;
            std::vector<std::string> text;
            if (main_rng.bernoulli(c.concentration)) {
                const auto w = main_rng.index(p.windows.size());
                d.timestamp = in_window(main_rng, p.windows[w]);
                add_some(main_rng, p.burst[w], 1, 2, text);
            } else {
                d.timestamp = uniform_time(main_rng, start, end);
            }
            if (main_rng.bernoulli(0.85)) add_some(main_rng, p.core, 1, 2, text);
            add_some(main_rng, p.topical, 1, 2, text);
            add_background(main_rng, background, 5, 10, text);
            d.raw = account_metadata(main_rng, 0.05);
            d.text = compose(main_rng, std::move(text), 0.35);
            d.account = synth_word(main_rng.index(kAccounts));
            d.topic = p.query_id;
            d.grade = main_rng.bernoulli(0.3) ? 2 : 1;
            main.push_back(std::move(d));
        }
        const auto noise = static_cast<std::size_t>(std::llround(c.noise_rate * static_cast<double>(p.relevant)));
        for (std::size_t i = 0; i < noise; ++i) {
            Draft d;
            std::vector<std::string> text;
            d.timestamp = uniform_time(main_rng, start, end);
            add_some(main_rng, p.core, 1, 2, text);
            if (main_rng.bernoulli(0.6)) text.push_back(pick(main_rng, p.stale));
            add_background(main_rng, background, 5, 10, text);
            d.raw = account_metadata(main_rng, 0.1);
            d.text = compose(main_rng, std::move(text), 0.2);
            d.account = synth_word(main_rng.index(kAccounts));
            d.topic = p.query_id;
            d.grade = 0;
            main.push_back(std::move(d));
        }
    }
    while (main.size() < c.main_docs) {
        Draft d;
        std::vector<std::string> text;
        d.timestamp = uniform_time(main_rng, start, end);
        add_background(main_rng, background, 6, 14, text);
        d.raw = account_metadata(main_rng, 0.1);
        d.text = compose(main_rng, std::move(text), 0.2);
        d.account = synth_word(main_rng.index(kAccounts));
        if (main_rng.bernoulli(c.retweet_rate)) {
            d.text = "RT @" + synth_word(main_rng.index(kAccounts)) + ": " + d.text;
            d.raw.is_retweet = true;
        }
        main.push_back(std::move(d));
    }

    // external collection
    std::vector<Draft> external;
    for (const auto& p : plans) {
        for (std::size_t i = 0; i < c.external_per_topic; ++i) {
            Draft d;
            std::vector<std::string> text;
            if (external_rng.bernoulli(c.external_concentration)) {
                const auto w = external_rng.index(p.windows.size());
                d.timestamp = in_window(external_rng, p.windows[w]);
                add_some(external_rng, p.burst[w], 1, 3, text);
            } else {
                d.timestamp = uniform_time(external_rng, start, end);
                add_some(external_rng, p.stale, 1, 2, text);
            }
            add_some(external_rng, p.core, 1, 3, text);
            add_some(external_rng, p.topical, 1, 2, text);
            add_background(external_rng, background, 4, 8, text);
            d.raw = account_metadata(external_rng, 0.0);
            d.text = compose(external_rng, std::move(text), 0.5);
            d.account = "news" + std::to_string(external_rng.index(200));
            external.push_back(std::move(d));
        }
    }
    std::vector<std::vector<std::string>> background_topics;
    for (std::size_t t = 0; t < c.external_topics; ++t) background_topics.push_back(words(kBackgroundTopicTerms));
    while (external.size() < c.external_docs) {
        Draft d;
        std::vector<std::string> text;
        d.timestamp = uniform_time(external_rng, start, end);
        add_some(external_rng, background_topics[external_rng.index(background_topics.size())], 2, 4, text);
        add_background(external_rng, background, 4, 8, text);
        d.raw = account_metadata(external_rng, 0.0);
        d.text = compose(external_rng, std::move(text), 0.5);
        d.account = "news" + std::to_string(external_rng.index(200));
        external.push_back(std::move(d));
    }

    // ids increase with time, as status ids do
    auto finish = [](std::vector<Draft>& drafts, std::uint64_t first_id, std::vector<Document>& documents,
                     Qrels* qrels) {
        std::stable_sort(drafts.begin(), drafts.end(),
                         [](const Draft& a, const Draft& b) { return a.timestamp < b.timestamp; });
        for (std::size_t i = 0; i < drafts.size(); ++i) {
            auto& d = drafts[i];
            std::string id = std::to_string(first_id + i);
            if (qrels && d.grade >= 0) qrels->set(d.topic, id, d.grade);
            documents.push_back(make_document(std::move(id), d.timestamp, std::move(d.text), d.raw, d.account));
        }
    };
    finish(main, 300000000000000000ULL, out.main, &out.qrels);
    finish(external, 900000000000000000ULL, out.external, nullptr);
    return out;
}

void write_synth(const SynthCorpus& corpus, const std::string& directory) {
    std::filesystem::create_directories(directory);
    const std::filesystem::path dir(directory);
    auto jsonl = [](const std::vector<Document>& docs) {
        std::string text;
        for (const auto& d : docs) text += to_json_line(d) + '\n';
        return text;
    };
    write_file_atomic((dir / "main.jsonl").string(), jsonl(corpus.main));
    write_file_atomic((dir / "external.jsonl").string(), jsonl(corpus.external));
    write_file_atomic((dir / "topics.tsv").string(), write_topics(corpus.topics));
    write_file_atomic((dir / "train_topics.tsv").string(), write_topics(corpus.train_topics));
    write_file_atomic((dir / "qrels.txt").string(), write_qrels(corpus.qrels));
    std::string bursts;
    for (const auto& b : corpus.bursts) {
        bursts += b.query_id + '\t' + std::to_string(b.begin) + '\t' + std::to_string(b.end) + '\n';
    }
    write_file_atomic((dir / "bursts.tsv").string(), bursts);
}

}  // namespace temporafed
