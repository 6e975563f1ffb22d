#pragma once

#include "spheredepth/depth.hpp"
#include "spheredepth/partition.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

/// Depth-based medoids clustering: medoids are sample points, points join
/// the medoid of maximal depth similarity, and each medoid is refined to
/// the deepest point of its cluster.
namespace spheredepth::dbmca {

/// Seeding rule for the initial medoids.
///   Depth:  similarity-weighted draws within each medoid neighbourhood
///           (each new medoid is drawn with probability proportional to its
///           depth w.r.t. the closest medoid already chosen).
///   Spread: k-means++-style draws proportional to max_depth - sim, which
///           pushes new medoids away from existing ones. Kept for
///           comparison with Depth.
enum class Seeding { Depth, Spread };

std::string_view to_string(Seeding seeding);
Seeding parse_seeding(std::string_view text);

struct ClusterModel {
    Partition partition;
    std::vector<std::size_t> medoid_indices;
    DepthKind kind;
    /// J = sum_i sim(x_i, m_label(i)) after every assignment step.
    std::vector<double> objective_trace;
    /// Refinement steps performed.
    std::size_t iterations = 0;
    bool converged = false;
    /// Mean depth silhouette; NaN when K = 1 or when not computed.
    double silhouette = std::numeric_limits<double>::quiet_NaN();

    double objective() const { return objective_trace.back(); }
};

struct SilhouetteReport {
    std::vector<double> per_point;
    double mean = 0.0;
};

struct FitOptions {
    std::size_t max_iter = 100;
    Seeding seeding = Seeding::Depth;
    bool compute_silhouette = true;
};

/// k distinct seed medoids, deterministic per seed. Throws
/// std::invalid_argument unless 1 <= k <= n.
std::vector<std::size_t> init_medoids(const SimilaritySource& sim, std::size_t k, std::uint64_t seed,
                                      Seeding seeding = Seeding::Depth);

/// label(i) = argmax_k sim(x_i, m_k), ties to the lowest k. Every medoid is
/// labelled with its own cluster, so no cluster is ever empty.
Partition assign(const SimilaritySource& sim, std::span<const std::size_t> medoids);

/// For each cluster, the member with the largest within-cluster similarity
/// sum (its deepest point); ties go to the lowest index.
std::vector<std::size_t> refine(const SimilaritySource& sim, const Partition& partition);

/// As above, but a current medoid that ties for the maximum is kept. Used by
/// fit so that any medoid change strictly increases the objective.
std::vector<std::size_t> refine(const SimilaritySource& sim, const Partition& partition,
                                std::span<const std::size_t> incumbent);

/// J = sum_i sim(x_i, m_label(i)).
double objective(const SimilaritySource& sim, const Partition& partition, std::span<const std::size_t> medoids);

/// Alternate assign / refine from seeded medoids until the medoid set is a
/// fixpoint or max_iter refinements have run (then converged = false).
ClusterModel fit(const SimilaritySource& sim, std::size_t k, std::uint64_t seed, const FitOptions& options = {});

/// Depth-similarity silhouette: a' is the mean similarity to the rest of the
/// own cluster, b' the largest mean similarity to another cluster;
/// s = 1 - b'/a' if a' > b', 0 if equal, a'/b' - 1 otherwise. Singletons
/// score 0. Throws std::invalid_argument when K < 2.
SilhouetteReport silhouette(const SimilaritySource& sim, const Partition& partition);

struct SelectOptions {
    std::size_t restarts = 10;
    FitOptions fit;
    std::size_t workers = 1;
};

struct Selection {
    std::size_t best_k = 0;
    std::vector<std::size_t> ks;
    /// Best-of-restarts model for each entry of ks, same order.
    std::vector<ClusterModel> models;

    const ClusterModel& best() const;
    const ClusterModel* model_for(std::size_t k) const;
};

/// Best of `restarts` seeded fits by objective; ties go to the earlier
/// restart.
ClusterModel fit_best_of(const SimilaritySource& sim, std::size_t k, std::uint64_t seed,
                         const SelectOptions& options = {});

/// Fit every k in k_range (each within [2, n]) and pick the one with the
/// largest mean silhouette, ties to the smaller k.
Selection select_k(const SimilaritySource& sim, std::span<const std::size_t> k_range, std::uint64_t seed,
                   const SelectOptions& options = {});

}  // namespace spheredepth::dbmca
