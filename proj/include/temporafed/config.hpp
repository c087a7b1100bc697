#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "temporafed/retrieval.hpp"
#include "temporafed/temporal.hpp"

namespace temporafed {

enum class Method { lmdir, recency, kde_score, kde_rank, ltr, rm_e, rmt_e, kde_e, full };

Method parse_method(std::string_view name);
std::string_view method_name(Method method);

struct ExperimentConfig {
    Method method = Method::lmdir;
    ScorerKind scorer = ScorerKind::lm_dirichlet;  // first-stage candidate retrieval; recency method overrides
    double mu = 2500.0;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    double recency_rate = kDefaultRecencyRate;
    std::size_t clusters = 200;  // K
    std::size_t kmeans_batch = 256;
    std::size_t kmeans_iterations = 100;
    std::size_t v_sel = 3;
    std::size_t k_merge = 50;
    std::size_t n_fb = 50;
    std::size_t n_terms = 20;
    double lambda = 0.5;
    WeightScheme kde_scheme = WeightScheme::rank;
    double period = kSecondsPerDay;
    std::size_t depth = 1000;  // candidates re-ranked per query
    std::size_t k = 1000;      // run length
    std::uint64_t seed = 42;
    std::size_t ca_restarts = 3;
    std::size_t ca_max_iters = 25;
    double ca_tolerance = 1e-5;
};

/// Sets one documented key; throws Error on unknown keys or bad values.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment. Errors name the line.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name,
                              ExperimentConfig base = {});
ExperimentConfig read_config_file(const std::string& path, ExperimentConfig base = {});

/// Canonical form listing every key, one per line, in a fixed order.
std::string write_config(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over write_config.
std::string config_hash(const ExperimentConfig& config);

/// Seed for a named sub-task (clustering, training, ...) derived from the root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t salt);

}  // namespace temporafed
