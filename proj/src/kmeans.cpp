#include <algorithm>
#include <cmath>
#include <limits>

#include "temporafed/random.hpp"
#include "temporafed/verticals.hpp"

namespace temporafed {

std::vector<SparseVector> tfidf_vectors(const Index& index) {
    const double n = static_cast<double>(index.doc_count());
    std::vector<SparseVector> vectors(index.doc_count());
    for (TermId term = 0; term < index.vocabulary_size(); ++term) {
        const double idf = std::log(n / static_cast<double>(index.df(term)));
        if (idf <= 0.0) continue;
        for (const Posting& p : index.postings(term)) {
            vectors[p.doc].entries.emplace_back(term, (1.0 + std::log(static_cast<double>(p.tf))) * idf);
        }
    }
    for (auto& v : vectors) {
        double norm = 0.0;
        for (const auto& [t, w] : v.entries) norm += w * w;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (auto& [t, w] : v.entries) w /= norm;
        }
    }
    return vectors;
}

namespace {

/// Dense centroid stored as scale * raw so that the mini-batch update
/// c <- (1 - eta) c + eta x costs O(nnz(x)).
struct Centroid {
    std::vector<double> raw;
    double scale = 1.0;
    double raw_norm2 = 0.0;

    void assign(const SparseVector& x) {
        std::fill(raw.begin(), raw.end(), 0.0);
        raw_norm2 = 0.0;
        for (const auto& [t, w] : x.entries) {
            raw[t] = w;
            raw_norm2 += w * w;
        }
        scale = 1.0;
    }

    void blend(const SparseVector& x, double eta) {
        if (eta >= 1.0) {
            assign(x);
            return;
        }
        scale *= 1.0 - eta;
        for (const auto& [t, w] : x.entries) {
            const double old = raw[t];
            raw[t] += eta * w / scale;
            raw_norm2 += raw[t] * raw[t] - old * old;
        }
        if (scale < 1e-100) renormalize();
    }

    void renormalize() {
        raw_norm2 = 0.0;
        for (double& r : raw) {
            r *= scale;
            raw_norm2 += r * r;
        }
        scale = 1.0;
    }

    [[nodiscard]] double norm2() const { return scale * scale * raw_norm2; }

    [[nodiscard]] double distance2(const SparseVector& x, double x_norm2) const {
        double dot = 0.0;
        for (const auto& [t, w] : x.entries) dot += raw[t] * w;
        return std::max(0.0, x_norm2 - 2.0 * scale * dot + norm2());
    }
};

struct Nearest {
    std::uint32_t cluster;
    double distance2;
};

Nearest nearest(const std::vector<Centroid>& centroids, const SparseVector& x, double x_norm2) {
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (std::uint32_t c = 0; c < centroids.size(); ++c) {
        const double d = centroids[c].distance2(x, x_norm2);
        if (d < best.distance2) best = {c, d};
    }
    return best;
}

}  // namespace

ClusterAssignment cluster_verticals(const std::vector<Document>& documents, const ClusteringParams& params) {
    if (params.k == 0) throw Error("cluster count K must be at least 1");
    if (params.k > documents.size()) {
        throw Error("cluster count K=" + std::to_string(params.k) + " exceeds document count " +
                    std::to_string(documents.size()));
    }
    const Index index = Index::build(documents);
    const auto vectors = tfidf_vectors(index);
    const std::size_t n = vectors.size();
    const std::size_t k = params.k;
    const std::size_t dims = std::max<std::size_t>(1, index.vocabulary_size());
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [t, w] : vectors[i].entries) norms[i] += w * w;
    }

    Rng rng(params.seed);
    std::vector<Centroid> centroids(k, Centroid{std::vector<double>(dims, 0.0)});

    // k-means++ seeding; once every remaining point coincides with a chosen
    // centroid, further centroids are drawn uniformly from unchosen points.
    std::vector<char> chosen(n, 0);
    std::vector<double> closest(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.index(n);
    centroids[0].assign(vectors[first]);
    chosen[first] = 1;
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            closest[i] = std::min(closest[i], centroids[c - 1].distance2(vectors[i], norms[i]));
            if (!chosen[i]) total += closest[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i] || closest[i] <= 0.0) continue;
                pick = i;
                target -= closest[i];
                if (target < 0.0) break;
            }
        }
        if (pick == n) {
            std::vector<std::size_t> remaining;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) remaining.push_back(i);
            }
            pick = remaining[rng.index(remaining.size())];
        }
        centroids[c].assign(vectors[pick]);
        chosen[pick] = 1;
    }

    std::vector<std::size_t> counts(k, 1);
    const std::size_t batch = std::max<std::size_t>(1, std::min(params.batch_size, n));
    std::vector<std::size_t> members(batch);
    std::vector<std::uint32_t> targets(batch);
    for (std::size_t iter = 0; iter < params.iterations; ++iter) {
        for (std::size_t b = 0; b < batch; ++b) {
            members[b] = rng.index(n);
            targets[b] = nearest(centroids, vectors[members[b]], norms[members[b]]).cluster;
        }
        for (std::size_t b = 0; b < batch; ++b) {
            const std::uint32_t c = targets[b];
            ++counts[c];
            centroids[c].blend(vectors[members[b]], 1.0 / static_cast<double>(counts[c]));
        }
    }

    ClusterAssignment out;
    out.k = k;
    out.labels.resize(n);
    std::vector<double> dist(n);
    auto assign_all = [&] {
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto best = nearest(centroids, vectors[i], norms[i]);
            out.labels[i] = best.cluster;
            dist[i] = best.distance2;
            ++sizes[best.cluster];
        }
        return sizes;
    };
    auto sizes = assign_all();
    for (std::size_t round = 0; round < 2 * k; ++round) {
        auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
        if (empty == sizes.end()) break;
        std::size_t farthest = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (sizes[out.labels[i]] < 2) continue;
            if (farthest == n || dist[i] > dist[farthest]) farthest = i;
        }
        if (farthest == n) break;
        centroids[static_cast<std::size_t>(empty - sizes.begin())].assign(vectors[farthest]);
        sizes = assign_all();
    }

    out.label_terms.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const auto& raw = centroids[c].raw;
        auto top = std::max_element(raw.begin(), raw.end());
        if (index.vocabulary_size() > 0 && top != raw.end() && *top > 0.0) {
            out.label_terms[c] = index.term(static_cast<TermId>(top - raw.begin()));
        }
    }
    return out;
}

}  // namespace temporafed
