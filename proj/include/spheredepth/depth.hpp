#pragma once

#include "spheredepth/sphere.hpp"

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace spheredepth {

/// Which distance-based angular depth is in force.
///   Arc:    pi - E[arccos(x'W)]        (ADD), values in [0, pi]
///   Cosine: 2  - E[1 - x'W]            (CDD), values in [0, 2]
///   Chord:  2  - E[sqrt(2(1 - x'W))]   (ChDD), values in [0, 2]
enum class DepthKind { Arc, Cosine, Chord };

inline constexpr DepthKind kAllDepthKinds[] = {DepthKind::Arc, DepthKind::Cosine, DepthKind::Chord};

/// Short tag used in CSV output: ADD, CDD, ChDD.
std::string_view to_string(DepthKind kind);

/// Accepts arc|cosine|chord and add|cdd|chdd, case-insensitive.
DepthKind parse_depth_kind(std::string_view text);

/// Upper bound of the depth scale: pi for Arc, 2 otherwise. Attained by a
/// point mass at x.
constexpr double max_depth(DepthKind kind) {
    return kind == DepthKind::Arc ? std::numbers::pi : 2.0;
}

/// Distance underlying each kind, as a function of the inner product.
double distance_from_cosine(double c, DepthKind kind);

/// Same distance from the coordinates, accurate near 0 and pi.
double distance(const Separation& s, DepthKind kind);

/// Depth of x w.r.t. the point mass at y: max_depth - distance.
inline double similarity_from_cosine(double c, DepthKind kind) {
    return max_depth(kind) - distance_from_cosine(c, kind);
}

struct DepthValue {
    double value;
    DepthKind kind;
};

struct AlphaRegion {
    double alpha;
    std::vector<std::size_t> member_indices;
};

/// Empirical depth of x w.r.t. `sample` (the sample mean replaces E_F).
/// If x is itself in the sample it contributes its own maximal similarity.
template <SpherePoint P>
DepthValue sample_depth(const P& x, std::type_identity_t<std::span<const P>> sample, DepthKind kind);

/// sim(x, y) = depth of x w.r.t. the point mass at y.
template <SpherePoint P>
double pairwise_similarity(const P& x, const P& y, DepthKind kind) {
    return max_depth(kind) - distance(separation(x, y), kind);
}

/// Index of the sample point of maximal empirical depth; ties go to the
/// smallest index.
template <SpherePoint P>
std::size_t deepest_point_index(std::span<const P> sample, DepthKind kind);

/// Sample indices whose depth w.r.t. the whole sample is >= alpha.
template <SpherePoint P>
AlphaRegion alpha_region(std::span<const P> sample, DepthKind kind, double alpha);

/// Read access to pairwise depth similarities of a fixed sample. Clustering
/// consumes data only through this interface, so a materialized matrix and
/// an on-the-fly source are interchangeable.
class SimilaritySource {
public:
    virtual ~SimilaritySource() = default;

    virtual std::size_t size() const = 0;
    virtual DepthKind kind() const = 0;
    /// Row i of the similarity matrix. Implementations that do not store
    /// rows fill `scratch` and return a view of it.
    virtual std::span<const double> row(std::size_t i, std::vector<double>& scratch) const = 0;
    virtual double at(std::size_t i, std::size_t j) const = 0;
};

/// Materialized n x n similarity matrix, row-major, symmetric, with the
/// kind's maximum on the diagonal.
class DepthMatrix final : public SimilaritySource {
public:
    DepthMatrix(std::size_t n, DepthKind kind, std::vector<double> values);

    std::size_t size() const override { return n_; }
    DepthKind kind() const override { return kind_; }
    std::span<const double> row(std::size_t i, std::vector<double>&) const override { return row(i); }
    double at(std::size_t i, std::size_t j) const override { return values_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * n_, n_);
    }

private:
    std::size_t n_;
    DepthKind kind_;
    std::vector<double> values_;
};

/// Computes rows on demand from the points; O(n) memory. Intended for
/// samples too large to materialize (the points must outlive the source).
template <SpherePoint P>
class StreamingSimilarity final : public SimilaritySource {
public:
    StreamingSimilarity(std::span<const P> points, DepthKind kind) : points_(points), kind_(kind) {}

    std::size_t size() const override { return points_.size(); }
    DepthKind kind() const override { return kind_; }
    std::span<const double> row(std::size_t i, std::vector<double>& scratch) const override {
        scratch.resize(points_.size());
        for (std::size_t j = 0; j < points_.size(); ++j) {
            scratch[j] = pairwise_similarity(points_[i], points_[j], kind_);
        }
        return scratch;
    }
    double at(std::size_t i, std::size_t j) const override {
        return pairwise_similarity(points_[i], points_[j], kind_);
    }

private:
    std::span<const P> points_;
    DepthKind kind_;
};

/// Above this many points callers should prefer StreamingSimilarity.
inline constexpr std::size_t kMaterializeLimit = 20000;

/// Entry (i, j) = pairwise_similarity(sample[i], sample[j], kind). Rows are
/// filled in parallel over `workers` threads.
template <SpherePoint P>
DepthMatrix depth_matrix(std::span<const P> sample, DepthKind kind, std::size_t workers = 1);

template <SpherePoint P>
std::size_t deepest_point_index(const std::vector<P>& sample, DepthKind kind) {
    return deepest_point_index(std::span<const P>(sample), kind);
}

template <SpherePoint P>
AlphaRegion alpha_region(const std::vector<P>& sample, DepthKind kind, double alpha) {
    return alpha_region(std::span<const P>(sample), kind, alpha);
}

template <SpherePoint P>
DepthMatrix depth_matrix(const std::vector<P>& sample, DepthKind kind, std::size_t workers = 1) {
    return depth_matrix(std::span<const P>(sample), kind, workers);
}

}  // namespace spheredepth
