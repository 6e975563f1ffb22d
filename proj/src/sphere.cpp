#include "spheredepth/sphere.hpp"

#include "spheredepth/random.hpp"

#include <limits>
#include <numeric>

namespace spheredepth {

namespace {

double squared_norm(std::span<const double> v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

// Multiply by 1/norm unless the vector is already unit to a few ulps, which
// keeps normalization idempotent.
bool needs_rescale(double norm) {
    return std::abs(norm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon();
}

double checked_norm(double sq, const char* what) {
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DegenerateVector(std::string(what) + ": zero or non-finite vector cannot be normalized");
    }
    return norm;
}

}  // namespace

DimensionMismatch::DimensionMismatch(std::size_t lhs, std::size_t rhs)
    : std::invalid_argument("dimension mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}

UnitVector::UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
        throw std::invalid_argument("UnitVector requires dimension >= 2");
    }
    const double norm = std::sqrt(squared_norm(coords_));
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kRenormalizeTolerance) {
        throw DegenerateVector("UnitVector: norm " + std::to_string(norm) + " is not within 1e-6 of 1");
    }
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
        for (double& c : coords_) c /= norm;
    }
}

UnitVector UnitVector::operator-() const {
    std::vector<double> neg(coords_.size());
    std::transform(coords_.begin(), coords_.end(), neg.begin(), [](double c) { return -c; });
    return UnitVector(Trusted{}, std::move(neg));
}

SparseUnitVector::SparseUnitVector(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
    double sq = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.index >= dim_) {
            throw std::invalid_argument("SparseUnitVector: index " + std::to_string(e.index) +
                                        " out of range for dim " + std::to_string(dim_));
        }
        if (i > 0 && entries_[i - 1].index >= e.index) {
            throw std::invalid_argument("SparseUnitVector: indices must be strictly increasing");
        }
        if (e.value == 0.0) {
            throw std::invalid_argument("SparseUnitVector: stored values must be nonzero");
        }
        sq += e.value * e.value;
    }
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kRenormalizeTolerance) {
        throw DegenerateVector("SparseUnitVector: norm " + std::to_string(norm) + " is not within 1e-6 of 1");
    }
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
        for (auto& e : entries_) e.value /= norm;
    }
}

UnitVector SparseUnitVector::to_dense() const {
    std::vector<double> dense(dim_, 0.0);
    for (const auto& e : entries_) dense[e.index] = e.value;
    return UnitVector(std::move(dense));
}

UnitVector normalize(std::span<const double> v) {
    if (v.size() < 2) {
        throw std::invalid_argument("normalize: dimension must be >= 2");
    }
    const double norm = checked_norm(squared_norm(v), "normalize");
    std::vector<double> out(v.begin(), v.end());
    if (needs_rescale(norm)) {
        for (double& c : out) c /= norm;
    }
    return UnitVector(UnitVector::Trusted{}, std::move(out));
}

SparseUnitVector normalize_sparse(std::size_t dim, std::vector<SparseUnitVector::Entry> entries) {
    std::erase_if(entries, [](const auto& e) { return e.value == 0.0; });
    double sq = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].index >= dim) {
            throw std::invalid_argument("normalize_sparse: index out of range");
        }
        if (i > 0 && entries[i - 1].index >= entries[i].index) {
            throw std::invalid_argument("normalize_sparse: indices must be strictly increasing");
        }
        sq += entries[i].value * entries[i].value;
    }
    const double norm = checked_norm(sq, "normalize_sparse");
    if (needs_rescale(norm)) {
        for (auto& e : entries) e.value /= norm;
    }
    return SparseUnitVector(SparseUnitVector::Trusted{}, dim, std::move(entries));
}

double dot(const UnitVector& a, const UnitVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    const auto x = a.coords();
    const auto y = b.coords();
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

double dot(const SparseUnitVector& a, const SparseUnitVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    const auto x = a.entries();
    const auto y = b.entries();
    double s = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].index < y[j].index) {
            ++i;
        } else if (y[j].index < x[i].index) {
            ++j;
        } else {
            s += x[i].value * y[j].value;
            ++i;
            ++j;
        }
    }
    return s;
}

double dot(const SparseUnitVector& a, std::span<const double> dense) {
    if (a.dim() != dense.size()) throw DimensionMismatch(a.dim(), dense.size());
    double s = 0.0;
    for (const auto& e : a.entries()) s += e.value * dense[e.index];
    return s;
}

double dot(const UnitVector& a, std::span<const double> dense) {
    if (a.dim() != dense.size()) throw DimensionMismatch(a.dim(), dense.size());
    const auto x = a.coords();
    return std::inner_product(x.begin(), x.end(), dense.begin(), 0.0);
}

Separation separation(const UnitVector& a, const UnitVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    const auto x = a.coords();
    const auto y = b.coords();
    Separation s{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        const double t = x[i] + y[i];
        s.diff_sq += d * d;
        s.sum_sq += t * t;
    }
    return s;
}

Separation separation(const SparseUnitVector& a, const SparseUnitVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    const auto x = a.entries();
    const auto y = b.entries();
    Separation s{0.0, 0.0};
    auto one_sided = [&s](double v) {
        s.diff_sq += v * v;
        s.sum_sq += v * v;
    };
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].index < y[j].index)) {
            one_sided(x[i++].value);
        } else if (i == x.size() || y[j].index < x[i].index) {
            one_sided(y[j++].value);
        } else {
            const double d = x[i].value - y[j].value;
            const double t = x[i].value + y[j].value;
            s.diff_sq += d * d;
            s.sum_sq += t * t;
            ++i;
            ++j;
        }
    }
    return s;
}

std::vector<double> mean_vector(std::span<const UnitVector> points) {
    if (points.empty()) throw std::invalid_argument("mean_vector: empty sample");
    const std::size_t d = points.front().dim();
    std::vector<double> m(d, 0.0);
    for (const auto& p : points) {
        if (p.dim() != d) throw DimensionMismatch(d, p.dim());
        for (std::size_t i = 0; i < d; ++i) m[i] += p[i];
    }
    for (double& c : m) c /= static_cast<double>(points.size());
    return m;
}

double mean_resultant_length(std::span<const UnitVector> points) {
    const auto m = mean_vector(points);
    return std::sqrt(squared_norm(m));
}

Rotation::Rotation(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 2) {
        throw std::invalid_argument("Rotation: matrix must be square with d >= 2");
    }
    const auto n = matrix_.rows();
    const double err = (matrix_.transpose() * matrix_ - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (err > 1e-10) {
        throw std::invalid_argument("Rotation: matrix is not orthogonal (max |Q'Q - I| = " + std::to_string(err) + ")");
    }
}

UnitVector Rotation::apply(const UnitVector& x) const {
    if (x.dim() != dim()) throw DimensionMismatch(dim(), x.dim());
    const Eigen::Map<const Eigen::VectorXd> v(x.coords().data(), static_cast<Eigen::Index>(x.dim()));
    const Eigen::VectorXd r = matrix_ * v;
    return normalize(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
}

std::vector<UnitVector> Rotation::apply(std::span<const UnitVector> xs) const {
    std::vector<UnitVector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(apply(x));
    return out;
}

Rotation random_rotation(std::size_t d, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("random_rotation: d must be >= 2");
    Rng rng(seed);
    std::normal_distribution<double> normal;
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return Rotation(std::move(q));
}

}  // namespace spheredepth
