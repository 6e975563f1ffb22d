#pragma once

#include "spheredepth/depth.hpp"
#include "spheredepth/partition.hpp"
#include "spheredepth/sphere.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

/// Spherical k-means baseline: maximize sum_i x_i'c_label(i) over unit
/// centroids.
namespace spheredepth::skmeans {

struct Result {
    Partition partition;
    /// Unit-norm dense centroids, one per cluster.
    std::vector<std::vector<double>> centroids;
    /// Objective after every assignment step; non-decreasing.
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
    bool converged = false;

    double objective() const { return objective_trace.back(); }
};

/// Seeds with k-means++ weights proportional to the cosine distance to the
/// nearest chosen centroid (the squared chord distance, up to a factor 2).
/// An empty cluster is re-seeded with the worst-fitting point.
template <SpherePoint P>
Result spherical_kmeans(std::span<const P> points, std::size_t k, std::uint64_t seed, std::size_t max_iter = 100);

template <SpherePoint P>
Result spherical_kmeans(const std::vector<P>& points, std::size_t k, std::uint64_t seed,
                        std::size_t max_iter = 100) {
    return spherical_kmeans(std::span<const P>(points), k, seed, max_iter);
}

/// Best objective over `restarts` seeded runs; ties to the earlier run.
template <SpherePoint P>
Result best_of(std::span<const P> points, std::size_t k, std::uint64_t seed, std::size_t restarts,
               std::size_t max_iter = 100);

struct Selection {
    std::size_t best_k = 0;
    std::vector<std::size_t> ks;
    std::vector<Result> results;
    /// Mean depth silhouette of each result under the supplied similarity.
    std::vector<double> silhouettes;
};

/// Silhouette-based choice of k for the baseline, scored with the same
/// depth similarity used for DBMCA so the two methods are comparable.
template <SpherePoint P>
Selection select_k(std::span<const P> points, const SimilaritySource& sim, std::span<const std::size_t> k_range,
                   std::uint64_t seed, std::size_t restarts = 10);

}  // namespace spheredepth::skmeans
