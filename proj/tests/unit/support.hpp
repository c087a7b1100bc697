#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "temporafed/corpus.hpp"
#include "temporafed/retrieval.hpp"

namespace support {

using temporafed::Document;
using temporafed::Timestamp;

inline Document doc(std::string id, Timestamp ts, std::string text) {
    return temporafed::make_document(std::move(id), ts, std::move(text));
}

inline std::vector<Document> docs(const std::vector<std::string>& texts, Timestamp first = 1000, Timestamp step = 100) {
    std::vector<Document> out;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        out.push_back(doc("d" + std::to_string(i + 1), first + static_cast<Timestamp>(i) * step, texts[i]));
    }
    return out;
}

// Straight counting over raw token lists, independent of the index.
struct Counts {
    std::vector<std::vector<std::string>> tokens;

    explicit Counts(const std::vector<Document>& documents) {
        for (const auto& d : documents) tokens.push_back(d.tokens);
    }
    double tf(std::size_t d, const std::string& w) const {
        double n = 0;
        for (const auto& t : tokens[d]) n += t == w;
        return n;
    }
    double cf(const std::string& w) const {
        double n = 0;
        for (std::size_t d = 0; d < tokens.size(); ++d) n += tf(d, w);
        return n;
    }
    double df(const std::string& w) const {
        double n = 0;
        for (std::size_t d = 0; d < tokens.size(); ++d) n += tf(d, w) > 0;
        return n;
    }
    double length(std::size_t d) const { return static_cast<double>(tokens[d].size()); }
    double total() const {
        double n = 0;
        for (std::size_t d = 0; d < tokens.size(); ++d) n += length(d);
        return n;
    }
    double n() const { return static_cast<double>(tokens.size()); }

    double lm_dirichlet(std::size_t d, const std::map<std::string, double>& q, double mu) const {
        double s = 0;
        for (const auto& [w, qw] : q) {
            if (cf(w) == 0) continue;
            s += qw * std::log((tf(d, w) + mu * cf(w) / total()) / (length(d) + mu));
        }
        return s;
    }
    double bm25(std::size_t d, const std::map<std::string, double>& q, double k1, double b) const {
        double s = 0;
        const double avg = total() / n();
        for (const auto& [w, qw] : q) {
            const double f = tf(d, w);
            if (f == 0) continue;
            const double idf = std::log(1.0 + (n() - df(w) + 0.5) / (df(w) + 0.5));
            s += qw * idf * f * (k1 + 1) / (f + k1 * (1 - b + b * length(d) / avg));
        }
        return s;
    }
    double idf_sum(std::size_t d, const std::map<std::string, double>& q) const {
        double s = 0;
        for (const auto& [w, qw] : q) {
            if (tf(d, w) > 0) s += qw * std::log(n() / df(w));
        }
        return s;
    }
    // P(w|d) maximum likelihood
    double mle(std::size_t d, const std::string& w) const { return tf(d, w) / length(d); }
};

}  // namespace support
