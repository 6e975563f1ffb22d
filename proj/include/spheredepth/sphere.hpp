#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spheredepth {

/// Raised when two operands live on spheres of different dimension.
class DimensionMismatch : public std::invalid_argument {
public:
    DimensionMismatch(std::size_t lhs, std::size_t rhs);
};

/// Raised for inputs that cannot be placed on the sphere (zero vectors,
/// norms far from one).
class DegenerateVector : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kUnitNormTolerance = 1e-10;
inline constexpr double kRenormalizeTolerance = 1e-6;

/// A point on S^{d-1}, d >= 2, stored densely.
///
/// Construction accepts vectors whose norm is within 1e-10 of one as-is,
/// silently renormalizes when the norm is within 1e-6 (text files lose digits),
/// and throws DegenerateVector beyond that.
class UnitVector {
public:
    explicit UnitVector(std::vector<double> coords);

    std::size_t dim() const noexcept { return coords_.size(); }
    std::span<const double> coords() const noexcept { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

    UnitVector operator-() const;

    friend bool operator==(const UnitVector&, const UnitVector&) = default;

private:
    struct Trusted {};
    UnitVector(Trusted, std::vector<double> coords) : coords_(std::move(coords)) {}
    friend UnitVector normalize(std::span<const double> v);

    std::vector<double> coords_;
};

/// A point on S^{dim-1} stored as (index, value) pairs with strictly
/// increasing 0-based indices. Same norm policy as UnitVector.
class SparseUnitVector {
public:
    struct Entry {
        std::uint32_t index;
        double value;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    SparseUnitVector(std::size_t dim, std::vector<Entry> entries);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    std::span<const Entry> entries() const noexcept { return entries_; }

    UnitVector to_dense() const;

    friend bool operator==(const SparseUnitVector&, const SparseUnitVector&) = default;

private:
    struct Trusted {};
    SparseUnitVector(Trusted, std::size_t dim, std::vector<Entry> entries)
        : dim_(dim), entries_(std::move(entries)) {}
    friend SparseUnitVector normalize_sparse(std::size_t dim,
                                             std::vector<SparseUnitVector::Entry> entries);

    std::size_t dim_;
    std::vector<Entry> entries_;
};

/// v / ||v||. Throws DegenerateVector for a zero (or non-finite) vector.
/// Idempotent bit-for-bit: an input already unit to machine precision is
/// returned unchanged.
UnitVector normalize(std::span<const double> v);

/// Sparse counterpart of normalize. Entries must have strictly increasing
/// indices below dim; zero values are dropped.
SparseUnitVector normalize_sparse(std::size_t dim, std::vector<SparseUnitVector::Entry> entries);

double dot(const UnitVector& a, const UnitVector& b);
double dot(const SparseUnitVector& a, const SparseUnitVector& b);
/// Sparse-dense product, used against dense centroids.
double dot(const SparseUnitVector& a, std::span<const double> dense);
double dot(const UnitVector& a, std::span<const double> dense);

/// Merge-join dot product of two sparse vectors, O(nnz(a) + nnz(b)).
inline double sparse_dot(const SparseUnitVector& a, const SparseUnitVector& b) { return dot(a, b); }

/// ||x - y||^2 and ||x + y||^2, accumulated directly from the coordinates.
/// Distances derived from x'y lose everything near 0 and pi (acos and the
/// square root turn one ulp of x'y into ~1e-8); these do not: identical
/// points give diff_sq == 0 and antipodes sum_sq == 0 exactly. For unit
/// vectors the two add up to 4; dividing by the actual sum removes norm
/// rounding as well.
struct Separation {
    double diff_sq;
    double sum_sq;
};

Separation separation(const UnitVector& a, const UnitVector& b);
Separation separation(const SparseUnitVector& a, const SparseUnitVector& b);

template <typename P>
concept SpherePoint = requires(const P& a, const P& b) {
    { dot(a, b) } -> std::convertible_to<double>;
    { separation(a, b) } -> std::same_as<Separation>;
    { a.dim() } -> std::convertible_to<std::size_t>;
};

/// Clamp a floating-point inner product of unit vectors into [-1, 1].
inline double clamp_cosine(double c) noexcept { return std::clamp(c, -1.0, 1.0); }

/// 1 - x'y = ||x - y||^2 / 2, in [0, 2].
inline double cosine_distance(const Separation& s) { return 2.0 * s.diff_sq / (s.diff_sq + s.sum_sq); }

/// Great-circle arc 2 atan2(||x - y||, ||x + y||), in [0, pi].
inline double geodesic_distance(const Separation& s) {
    return 2.0 * std::atan2(std::sqrt(s.diff_sq), std::sqrt(s.sum_sq));
}

/// Euclidean chord ||x - y||, in [0, 2].
inline double chord_distance(const Separation& s) { return 2.0 * std::sqrt(s.diff_sq / (s.diff_sq + s.sum_sq)); }

template <SpherePoint P>
double cosine_distance(const P& x, const P& y) {
    return cosine_distance(separation(x, y));
}

template <SpherePoint P>
double geodesic_distance(const P& x, const P& y) {
    return geodesic_distance(separation(x, y));
}

template <SpherePoint P>
double chord_distance(const P& x, const P& y) {
    return chord_distance(separation(x, y));
}

/// Sample mean of unit vectors (not renormalized).
std::vector<double> mean_vector(std::span<const UnitVector> points);

/// Norm of the sample mean; 1 for a point mass, near 0 for uniform data.
double mean_resultant_length(std::span<const UnitVector> points);

/// Orthogonal d x d matrix.
class Rotation {
public:
    explicit Rotation(Eigen::MatrixXd matrix);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

    UnitVector apply(const UnitVector& x) const;
    std::vector<UnitVector> apply(std::span<const UnitVector> xs) const;

private:
    Eigen::MatrixXd matrix_;
};

/// Haar-uniform random orthogonal matrix: QR of a standard normal matrix
/// with the signs of R's diagonal folded into Q. Deterministic per seed.
Rotation random_rotation(std::size_t d, std::uint64_t seed);

}  // namespace spheredepth
