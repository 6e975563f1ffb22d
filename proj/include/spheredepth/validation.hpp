#pragma once

#include "spheredepth/partition.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

/// External agreement indices between two partitions of the same n points:
/// Rand and adjusted Rand for crisp partitions, normalized degree of
/// concordance and adjusted concordance index for fuzzy ones.
namespace spheredepth::validation {

/// Raised when an index is undefined for its inputs (e.g. a vanishing
/// chance-correction denominator).
class DegenerateIndex : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Unordered pair tallies:
///   a: together in P and in Q      b: together in P only
///   c: together in Q only          d: apart in both
struct PairCounts {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t c = 0;
    std::uint64_t d = 0;

    std::uint64_t total() const noexcept { return a + b + c + d; }
    friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// Contingency-table computation, O(n + cells).
PairCounts pair_counts(const Partition& p, const Partition& q);

/// Reference O(n^2) enumeration of all pairs.
PairCounts pair_counts_brute_force(const Partition& p, const Partition& q);

/// (a + d) / C(n, 2). Requires n >= 2.
double rand_index(const Partition& p, const Partition& q);

/// 2(ad - bc) / (b^2 + c^2 + 2ad + (a + d)(b + c)). Equals 1 for identical
/// partitions, including the all-singletons and single-cluster cases where
/// the denominator vanishes.
double adjusted_rand_index(const PairCounts& counts);
double adjusted_rand_index(const Partition& p, const Partition& q);

/// n x K membership matrix with rows on the probability simplex (row sums
/// within 1e-9 of one).
class FuzzyPartition {
public:
    FuzzyPartition(std::size_t n, std::size_t k, std::vector<double> memberships);

    /// One-hot embedding of a crisp partition.
    static FuzzyPartition from_crisp(const Partition& p);

    std::size_t size() const noexcept { return n_; }
    std::size_t num_clusters() const noexcept { return k_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * k_, k_);
    }

    /// Crisp partition by row-wise argmax (ties to the lowest cluster),
    /// relabelled to drop unused clusters.
    Partition harden() const;

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<double> values_;
};

/// E(i, j) = 1 - ||w_i - w_j||_1 / 2, in [0, 1].
double fuzzy_equivalence(std::span<const double> wi, std::span<const double> wj);

/// 1 - (2 / (n(n-1))) sum_{i<j} |E_G(i,j) - E_H(i,j)|. Reduces to the Rand
/// index on one-hot inputs.
double ndc(const FuzzyPartition& g, const FuzzyPartition& h);

struct AciResult {
    double aci;
    double ndc;
    /// Mean NDC between G and row-permuted copies of H.
    double permuted_ndc_mean;
};

/// (NDC - mean NDC under permutation) / (1 - mean NDC under permutation),
/// with the mean taken over n_perm row permutations of H (G fixed).
/// Deterministic per seed regardless of `workers`. Throws DegenerateIndex if
/// the denominator falls below 1e-12.
AciResult aci_detailed(const FuzzyPartition& g, const FuzzyPartition& h, std::size_t n_perm, std::uint64_t seed,
                       std::size_t workers = 1);

inline double aci(const FuzzyPartition& g, const FuzzyPartition& h, std::size_t n_perm, std::uint64_t seed,
                  std::size_t workers = 1) {
    return aci_detailed(g, h, n_perm, seed, workers).aci;
}

}  // namespace spheredepth::validation
