#include "spheredepth/depth.hpp"

#include "spheredepth/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace spheredepth {

std::string_view to_string(DepthKind kind) {
    switch (kind) {
        case DepthKind::Arc: return "ADD";
        case DepthKind::Cosine: return "CDD";
        case DepthKind::Chord: return "ChDD";
    }
    return "?";
}

DepthKind parse_depth_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "arc" || lower == "add") return DepthKind::Arc;
    if (lower == "cosine" || lower == "cdd") return DepthKind::Cosine;
    if (lower == "chord" || lower == "chdd") return DepthKind::Chord;
    throw std::invalid_argument("unknown depth kind '" + std::string(text) + "' (expected arc, cosine or chord)");
}

double distance_from_cosine(double c, DepthKind kind) {
    c = clamp_cosine(c);
    switch (kind) {
        case DepthKind::Arc: return std::acos(c);
        case DepthKind::Cosine: return 1.0 - c;
        case DepthKind::Chord: return std::sqrt(2.0 * std::max(0.0, 1.0 - c));
    }
    throw std::logic_error("distance_from_cosine: bad kind");
}

double distance(const Separation& s, DepthKind kind) {
    switch (kind) {
        case DepthKind::Arc: return geodesic_distance(s);
        case DepthKind::Cosine: return cosine_distance(s);
        case DepthKind::Chord: return chord_distance(s);
    }
    throw std::logic_error("distance: bad kind");
}

template <SpherePoint P>
DepthValue sample_depth(const P& x, std::type_identity_t<std::span<const P>> sample, DepthKind kind) {
    if (sample.empty()) throw std::invalid_argument("sample_depth: empty sample");
    double total = 0.0;
    for (const auto& w : sample) total += distance(separation(x, w), kind);
    return {max_depth(kind) - total / static_cast<double>(sample.size()), kind};
}

namespace {

template <SpherePoint P>
std::vector<double> all_sample_depths(std::span<const P> sample, DepthKind kind) {
    std::vector<double> depths(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) depths[i] = sample_depth<P>(sample[i], sample, kind).value;
    return depths;
}

}  // namespace

template <SpherePoint P>
std::size_t deepest_point_index(std::span<const P> sample, DepthKind kind) {
    if (sample.empty()) throw std::invalid_argument("deepest_point_index: empty sample");
    const auto depths = all_sample_depths(sample, kind);
    // max_element returns the first maximum, i.e. the smallest index.
    return static_cast<std::size_t>(std::max_element(depths.begin(), depths.end()) - depths.begin());
}

template <SpherePoint P>
AlphaRegion alpha_region(std::span<const P> sample, DepthKind kind, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha_region: alpha must be > 0");
    AlphaRegion region{alpha, {}};
    if (sample.empty()) return region;
    const auto depths = all_sample_depths(sample, kind);
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (depths[i] >= alpha) region.member_indices.push_back(i);
    }
    return region;
}

DepthMatrix::DepthMatrix(std::size_t n, DepthKind kind, std::vector<double> values)
    : n_(n), kind_(kind), values_(std::move(values)) {
    if (values_.size() != n_ * n_) throw std::invalid_argument("DepthMatrix: expected n*n values");
}

template <SpherePoint P>
DepthMatrix depth_matrix(std::span<const P> sample, DepthKind kind, std::size_t workers) {
    const std::size_t n = sample.size();
    if (n == 0) throw std::invalid_argument("depth_matrix: empty sample");
    const std::size_t dim = sample.front().dim();
    for (const auto& p : sample) {
        if (p.dim() != dim) throw DimensionMismatch(dim, p.dim());
    }
    std::vector<double> values(n * n);
    // Row i owns the upper-triangle entries (i, j >= i) and mirrors them;
    // writes from different rows never collide.
    parallel_for(n, workers, [&](std::size_t i) {
        values[i * n + i] = max_depth(kind);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = pairwise_similarity(sample[i], sample[j], kind);
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    });
    return DepthMatrix(n, kind, std::move(values));
}

#define SPHEREDEPTH_INSTANTIATE_DEPTH(P)                                                              \
    template DepthValue sample_depth<P>(const P&, std::type_identity_t<std::span<const P>>, DepthKind); \
    template std::size_t deepest_point_index<P>(std::span<const P>, DepthKind);                        \
    template AlphaRegion alpha_region<P>(std::span<const P>, DepthKind, double);                       \
    template DepthMatrix depth_matrix<P>(std::span<const P>, DepthKind, std::size_t);

SPHEREDEPTH_INSTANTIATE_DEPTH(UnitVector)
SPHEREDEPTH_INSTANTIATE_DEPTH(SparseUnitVector)

#undef SPHEREDEPTH_INSTANTIATE_DEPTH

}  // namespace spheredepth
