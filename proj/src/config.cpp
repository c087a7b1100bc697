#include "temporafed/config.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "temporafed/random.hpp"

namespace temporafed {

namespace {

std::string_view scorer_key(ScorerKind kind) {
    switch (kind) {
        case ScorerKind::lm_dirichlet: return "lmdir";
        case ScorerKind::bm25: return "bm25";
        case ScorerKind::idf: return "idf";
        case ScorerKind::recency: return "recency";
    }
    return "lmdir";
}

constexpr std::array<std::pair<std::string_view, Method>, 9> kMethods = {{
    {"lmdir", Method::lmdir},
    {"recency", Method::recency},
    {"kde-score", Method::kde_score},
    {"kde-rank", Method::kde_rank},
    {"ltr", Method::ltr},
    {"rm-e", Method::rm_e},
    {"rmt-e", Method::rmt_e},
    {"kde-e", Method::kde_e},
    {"full", Method::full},
}};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value) {
    try {
        std::size_t used = 0;
        const std::string text(value);
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error("'" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
}

template <typename T>
T to_unsigned(std::string_view key, std::string_view value) {
    T v{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw Error("'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(value) + "'");
    }
    return v;
}

std::string exact(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

}  // namespace

Method parse_method(std::string_view name) {
    for (const auto& [text, method] : kMethods) {
        if (text == name) return method;
    }
    throw Error("unknown method '" + std::string(name) +
                "' (expected lmdir, recency, kde-score, kde-rank, ltr, rm-e, rmt-e, kde-e or full)");
}

std::string_view method_name(Method method) {
    for (const auto& [text, m] : kMethods) {
        if (m == method) return text;
    }
    return "?";
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
    if (key == "method") {
        c.method = parse_method(value);
    } else if (key == "scorer") {
        c.scorer = parse_scorer(value);
    } else if (key == "mu") {
        c.mu = to_double(key, value);
        if (!(c.mu > 0.0)) throw Error("'mu' must be positive");
    } else if (key == "bm25.k1") {
        c.bm25_k1 = to_double(key, value);
    } else if (key == "bm25.b") {
        c.bm25_b = to_double(key, value);
    } else if (key == "recency.rate") {
        c.recency_rate = to_double(key, value);
    } else if (key == "K") {
        c.clusters = to_unsigned<std::size_t>(key, value);
    } else if (key == "kmeans.batch") {
        c.kmeans_batch = to_unsigned<std::size_t>(key, value);
    } else if (key == "kmeans.iterations") {
        c.kmeans_iterations = to_unsigned<std::size_t>(key, value);
    } else if (key == "v_sel") {
        c.v_sel = to_unsigned<std::size_t>(key, value);
    } else if (key == "k_merge") {
        c.k_merge = to_unsigned<std::size_t>(key, value);
    } else if (key == "n_fb") {
        c.n_fb = to_unsigned<std::size_t>(key, value);
    } else if (key == "n_terms") {
        c.n_terms = to_unsigned<std::size_t>(key, value);
    } else if (key == "lambda") {
        c.lambda = to_double(key, value);
        if (c.lambda < 0.0 || c.lambda > 1.0) throw Error("'lambda' must lie in [0, 1]");
    } else if (key == "kde.scheme") {
        c.kde_scheme = parse_weight_scheme(value);
    } else if (key == "period") {
        c.period = to_double(key, value);
        if (!(c.period > 0.0)) throw Error("'period' must be positive");
    } else if (key == "depth") {
        c.depth = to_unsigned<std::size_t>(key, value);
    } else if (key == "k") {
        c.k = to_unsigned<std::size_t>(key, value);
    } else if (key == "seed") {
        c.seed = to_unsigned<std::uint64_t>(key, value);
    } else if (key == "ca.restarts") {
        c.ca_restarts = to_unsigned<std::size_t>(key, value);
    } else if (key == "ca.max_iters") {
        c.ca_max_iters = to_unsigned<std::size_t>(key, value);
    } else if (key == "ca.tolerance") {
        c.ca_tolerance = to_double(key, value);
    } else {
        throw Error("unknown configuration key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name, ExperimentConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "expected 'key = value'");
        const auto key = trim(view.substr(0, eq));
        const auto value = trim(view.substr(eq + 1));
        try {
            set_config_value(base, key, value);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(source_name, line_no, e.what());
        }
    }
    return base;
}

ExperimentConfig read_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path, std::move(base));
}

std::string write_config(const ExperimentConfig& c) {
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        out += std::string(key) + " = " + value + '\n';
    };
    line("method", std::string(method_name(c.method)));
    line("scorer", std::string(scorer_key(c.scorer)));
    line("mu", exact(c.mu));
    line("bm25.k1", exact(c.bm25_k1));
    line("bm25.b", exact(c.bm25_b));
    line("recency.rate", exact(c.recency_rate));
    line("K", std::to_string(c.clusters));
    line("kmeans.batch", std::to_string(c.kmeans_batch));
    line("kmeans.iterations", std::to_string(c.kmeans_iterations));
    line("v_sel", std::to_string(c.v_sel));
    line("k_merge", std::to_string(c.k_merge));
    line("n_fb", std::to_string(c.n_fb));
    line("n_terms", std::to_string(c.n_terms));
    line("lambda", exact(c.lambda));
    line("kde.scheme", c.kde_scheme == WeightScheme::rank ? "rank" : "score");
    line("period", exact(c.period));
    line("depth", std::to_string(c.depth));
    line("k", std::to_string(c.k));
    line("seed", std::to_string(c.seed));
    line("ca.restarts", std::to_string(c.ca_restarts));
    line("ca.max_iters", std::to_string(c.ca_max_iters));
    line("ca.tolerance", exact(c.ca_tolerance));
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : write_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
    return buffer;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t salt) { return Rng(root).fork(salt).next(); }

}  // namespace temporafed
