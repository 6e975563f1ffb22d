#include "spheredepth/skmeans.hpp"

#include "spheredepth/dbmca.hpp"
#include "spheredepth/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace spheredepth::skmeans {

namespace {

void add_to(std::vector<double>& acc, const UnitVector& x) {
    const auto c = x.coords();
    for (std::size_t i = 0; i < c.size(); ++i) acc[i] += c[i];
}

void add_to(std::vector<double>& acc, const SparseUnitVector& x) {
    for (const auto& e : x.entries()) acc[e.index] += e.value;
}

void set_to(std::vector<double>& out, const UnitVector& x) {
    out.assign(x.coords().begin(), x.coords().end());
}

void set_to(std::vector<double>& out, const SparseUnitVector& x) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& e : x.entries()) out[e.index] = e.value;
}

template <SpherePoint P>
std::vector<std::vector<double>> seed_centroids(std::span<const P> points, std::size_t k, Rng& rng) {
    const std::size_t n = points.size();
    const std::size_t d = points.front().dim();
    std::vector<std::vector<double>> centroids;
    std::vector<bool> used(n, false);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<double> weights(n);

    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    while (centroids.size() < k) {
        used[pick] = true;
        centroids.emplace_back(d);
        set_to(centroids.back(), points[pick]);
        if (centroids.size() == k) break;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], 1.0 - clamp_cosine(dot(points[i], centroids.back())));
            weights[i] = used[i] ? 0.0 : std::max(0.0, nearest[i]);
        }
        pick = draw_weighted(rng, weights);
        if (pick == n) {
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < n; ++i) {
                if (!used[i]) pool.push_back(i);
            }
            pick = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        }
    }
    return centroids;
}

}  // namespace

template <SpherePoint P>
Result spherical_kmeans(std::span<const P> points, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
    const std::size_t n = points.size();
    if (k < 1 || k > n) {
        throw std::invalid_argument("spherical_kmeans: k must lie in [1, n] (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
    const std::size_t d = points.front().dim();
    for (const auto& p : points) {
        if (p.dim() != d) throw DimensionMismatch(d, p.dim());
    }
    Rng rng(seed);
    auto centroids = seed_centroids(points, k, rng);

    std::vector<int> labels(n, -1);
    std::vector<double> fit(n);
    std::vector<double> trace;
    std::size_t iterations = 0;
    bool converged = false;

    for (;;) {
        // Assignment to the max-dot centroid, ties to the lowest index.
        std::vector<int> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            int label = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double s = dot(points[i], centroids[c]);
                if (s > best) {
                    best = s;
                    label = static_cast<int>(c);
                }
            }
            next[i] = label;
            fit[i] = best;
        }
        // Re-seed empty clusters with the worst-fitting point of a cluster
        // that can spare one.
        std::vector<std::size_t> sizes(k, 0);
        for (int l : next) ++sizes[static_cast<std::size_t>(l)];
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t worst = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(next[i])] > 1 && (worst == n || fit[i] < fit[worst])) worst = i;
            }
            --sizes[static_cast<std::size_t>(next[worst])];
            next[worst] = static_cast<int>(c);
            ++sizes[c];
            set_to(centroids[c], points[worst]);
            fit[worst] = dot(points[worst], centroids[c]);
        }

        long double total = 0.0L;
        for (double f : fit) total += f;
        trace.push_back(static_cast<double>(total));

        if (next == labels) {
            converged = true;
            break;
        }
        labels = std::move(next);
        if (iterations == max_iter) break;
        ++iterations;

        // Centroid update: normalized resultant of each cluster.
        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < n; ++i) add_to(sums[static_cast<std::size_t>(labels[i])], points[i]);
        for (std::size_t c = 0; c < k; ++c) {
            double sq = 0.0;
            for (double v : sums[c]) sq += v * v;
            if (sq > 0.0) {
                const double norm = std::sqrt(sq);
                for (double& v : sums[c]) v /= norm;
                centroids[c] = std::move(sums[c]);
            }
        }
    }
    return Result{Partition(std::move(labels)), std::move(centroids), std::move(trace), iterations, converged};
}

template <SpherePoint P>
Result best_of(std::span<const P> points, std::size_t k, std::uint64_t seed, std::size_t restarts,
               std::size_t max_iter) {
    restarts = std::max<std::size_t>(1, restarts);
    std::optional<Result> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        auto run = spherical_kmeans(points, k, derive_seed(seed, {k, r}), max_iter);
        if (!best || run.objective() > best->objective()) best = std::move(run);
    }
    return std::move(*best);
}

template <SpherePoint P>
Selection select_k(std::span<const P> points, const SimilaritySource& sim, std::span<const std::size_t> k_range,
                   std::uint64_t seed, std::size_t restarts) {
    if (k_range.empty()) throw std::invalid_argument("skmeans::select_k: empty k range");
    if (sim.size() != points.size()) throw std::invalid_argument("skmeans::select_k: similarity size mismatch");
    Selection selection;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k : k_range) {
        if (k < 2 || k > points.size()) throw std::invalid_argument("skmeans::select_k: every k must lie in [2, n]");
        auto result = best_of(points, k, seed, restarts);
        const double s = dbmca::silhouette(sim, result.partition).mean;
        if (s > best_score || (s == best_score && k < selection.best_k)) {
            best_score = s;
            selection.best_k = k;
        }
        selection.ks.push_back(k);
        selection.results.push_back(std::move(result));
        selection.silhouettes.push_back(s);
    }
    return selection;
}

#define SPHEREDEPTH_INSTANTIATE_SKMEANS(P)                                                            \
    template Result spherical_kmeans<P>(std::span<const P>, std::size_t, std::uint64_t, std::size_t); \
    template Result best_of<P>(std::span<const P>, std::size_t, std::uint64_t, std::size_t, std::size_t); \
    template Selection select_k<P>(std::span<const P>, const SimilaritySource&, std::span<const std::size_t>, \
                                   std::uint64_t, std::size_t);

SPHEREDEPTH_INSTANTIATE_SKMEANS(UnitVector)
SPHEREDEPTH_INSTANTIATE_SKMEANS(SparseUnitVector)

#undef SPHEREDEPTH_INSTANTIATE_SKMEANS

}  // namespace spheredepth::skmeans
