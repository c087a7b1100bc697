#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "temporafed/retrieval.hpp"

namespace temporafed {

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;
/// Floor applied to densities before they enter a logarithm.
inline constexpr double kDensityFloor = 1e-10;

/// 1.06 * sigma * n^(-1/5), sigma being the sample standard deviation.
/// Throws DegenerateSampleError for n < 2 or sigma == 0.
double silverman_bandwidth(std::span<const double> timestamps);

/// Bandwidth used when Silverman's rule is undefined.
double fallback_bandwidth(double period = kSecondsPerDay);

/// Weighted Gaussian kernel density estimate over timestamps (seconds).
/// Weights are stored rescaled to sum to n.
class TemporalDensity {
  public:
    TemporalDensity(std::vector<double> timestamps, std::vector<double> weights, double bandwidth);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }
    [[nodiscard]] std::size_t size() const noexcept { return timestamps_.size(); }
    [[nodiscard]] const std::vector<double>& timestamps() const noexcept { return timestamps_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] double min_timestamp() const noexcept { return min_; }
    [[nodiscard]] double max_timestamp() const noexcept { return max_; }

  private:
    std::vector<double> timestamps_;
    std::vector<double> weights_;
    double bandwidth_;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Fits a density. Without an explicit bandwidth, Silverman's rule is used,
/// falling back to fallback_bandwidth(period) for degenerate samples.
TemporalDensity kde_fit(std::span<const double> timestamps, std::span<const double> weights,
                        std::optional<double> bandwidth = std::nullopt, double period = kSecondsPerDay);

inline double kde_eval(const TemporalDensity& density, double t) { return density(t); }

enum class WeightScheme { score, rank };
WeightScheme parse_weight_scheme(std::string_view name);

/// Score: softmax over log-scores. Rank: proportional to 1/rank. Both rescaled
/// to sum to n.
std::vector<double> feedback_weights(const ScoredList& scored, WeightScheme scheme);

/// Fits a density on the timestamps of a retrieved list, using
/// feedback_weights(scheme). Throws DegenerateSampleError on an empty list.
TemporalDensity fit_feedback_density(const Index& index, const ScoredList& scored, WeightScheme scheme,
                                     double period = kSecondsPerDay);

struct TimeHistogram {
    double period = kSecondsPerDay;
    double origin = 0.0;
    std::vector<double> masses;

    [[nodiscard]] bool empty() const noexcept { return masses.empty(); }
};

/// Bin i covers [origin + i*period, origin + (i+1)*period). Samples before
/// the origin are rejected. Masses are normalized to sum 1.
TimeHistogram histogram(std::span<const double> timestamps, std::span<const double> weights, double period,
                        double origin);

/// Earth mover's distance in bins: sum of |CDF_a - CDF_b|. Histograms must
/// share period and origin; the shorter one is padded with empty bins.
double emd_1d(const TimeHistogram& a, const TimeHistogram& b);

}  // namespace temporafed
