#include "temporafed/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace temporafed {

double silverman_bandwidth(std::span<const double> timestamps) {
    const std::size_t n = timestamps.size();
    if (n < 2) throw DegenerateSampleError("Silverman bandwidth needs at least two samples");
    const double mean = std::accumulate(timestamps.begin(), timestamps.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double t : timestamps) ss += (t - mean) * (t - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sigma > 0.0)) throw DegenerateSampleError("Silverman bandwidth undefined for zero spread");
    return 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
}

double fallback_bandwidth(double period) { return std::max(kSecondsPerHour, period / 100.0); }

TemporalDensity::TemporalDensity(std::vector<double> timestamps, std::vector<double> weights, double bandwidth)
    : timestamps_(std::move(timestamps)), weights_(std::move(weights)), bandwidth_(bandwidth) {
    if (timestamps_.empty()) throw DegenerateSampleError("density needs at least one sample");
    if (weights_.size() != timestamps_.size()) throw Error("density weights and timestamps differ in length");
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) throw Error("density bandwidth must be positive");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error("density weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw Error("density weights are all zero");
    const double scale = static_cast<double>(weights_.size()) / total;
    for (double& w : weights_) w *= scale;
    auto [lo, hi] = std::minmax_element(timestamps_.begin(), timestamps_.end());
    min_ = *lo;
    max_ = *hi;
}

double TemporalDensity::operator()(double t) const {
    constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    double sum = 0.0;
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
        const double z = (t - timestamps_[i]) / bandwidth_;
        if (std::abs(z) > 40.0) continue;  // exp(-800) underflows anyway
        sum += weights_[i] * std::exp(-0.5 * z * z);
    }
    return inv_sqrt_2pi * sum / (static_cast<double>(timestamps_.size()) * bandwidth_);
}

TemporalDensity kde_fit(std::span<const double> timestamps, std::span<const double> weights,
                        std::optional<double> bandwidth, double period) {
    if (timestamps.empty()) throw DegenerateSampleError("density needs at least one sample");
    double h = 0.0;
    if (bandwidth) {
        h = *bandwidth;
    } else {
        try {
            h = silverman_bandwidth(timestamps);
        } catch (const DegenerateSampleError&) {
            h = fallback_bandwidth(period);
        }
    }
    return TemporalDensity({timestamps.begin(), timestamps.end()}, {weights.begin(), weights.end()}, h);
}

WeightScheme parse_weight_scheme(std::string_view name) {
    if (name == "score") return WeightScheme::score;
    if (name == "rank") return WeightScheme::rank;
    throw Error("unknown KDE weighting scheme '" + std::string(name) + "'");
}

std::vector<double> feedback_weights(const ScoredList& scored, WeightScheme scheme) {
    const std::size_t n = scored.entries.size();
    std::vector<double> weights(n);
    if (n == 0) return weights;
    if (scheme == WeightScheme::rank) {
        for (std::size_t i = 0; i < n; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
    } else {
        double top = scored.entries.front().score;
        for (const auto& e : scored.entries) top = std::max(top, e.score);
        for (std::size_t i = 0; i < n; ++i) weights[i] = std::exp(scored.entries[i].score - top);
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w *= static_cast<double>(n) / total;
    return weights;
}

TemporalDensity fit_feedback_density(const Index& index, const ScoredList& scored, WeightScheme scheme, double period) {
    if (scored.entries.empty()) throw DegenerateSampleError("no feedback documents for query " + scored.query_id);
    std::vector<double> times;
    times.reserve(scored.entries.size());
    for (const auto& e : scored.entries) times.push_back(static_cast<double>(index.document(e.internal).timestamp));
    const auto weights = feedback_weights(scored, scheme);
    return kde_fit(times, weights, std::nullopt, period);
}

TimeHistogram histogram(std::span<const double> timestamps, std::span<const double> weights, double period,
                        double origin) {
    if (!(period > 0.0)) throw Error("histogram period must be positive");
    if (weights.size() != timestamps.size()) throw Error("histogram weights and timestamps differ in length");
    TimeHistogram h;
    h.period = period;
    h.origin = origin;
    if (timestamps.empty()) return h;
    double total = 0.0;
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        if (timestamps[i] < origin) throw Error("histogram sample precedes origin");
        if (!(weights[i] >= 0.0)) throw Error("histogram weights must be non-negative");
        const auto bin = static_cast<std::size_t>(std::floor((timestamps[i] - origin) / period));
        if (bin >= h.masses.size()) h.masses.resize(bin + 1, 0.0);
        h.masses[bin] += weights[i];
        total += weights[i];
    }
    if (!(total > 0.0)) {
        h.masses.clear();
        return h;
    }
    for (double& m : h.masses) m /= total;
    return h;
}

double emd_1d(const TimeHistogram& a, const TimeHistogram& b) {
    if (a.period != b.period || a.origin != b.origin) throw Error("EMD requires histograms with identical binning");
    const std::size_t bins = std::max(a.masses.size(), b.masses.size());
    double cdf_a = 0.0;
    double cdf_b = 0.0;
    double distance = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        cdf_a += i < a.masses.size() ? a.masses[i] : 0.0;
        cdf_b += i < b.masses.size() ? b.masses[i] : 0.0;
        distance += std::abs(cdf_a - cdf_b);
    }
    return distance;
}

}  // namespace temporafed
