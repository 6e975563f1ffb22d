#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace spheredepth {

using Rng = std::mt19937_64;

/// One round of the SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derive an independent stream seed from a base seed and a tuple of
/// identifiers (cell, replicate, restart, ...). Order-sensitive.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept;

/// d i.i.d. N(0, 1) draws.
std::vector<double> standard_normal_vector(Rng& rng, std::size_t d);

/// Uniform double in [0, 1).
double uniform01(Rng& rng);

/// Draw an index with probability proportional to weights. Returns
/// weights.size() when every weight is zero.
std::size_t draw_weighted(Rng& rng, const std::vector<double>& weights);

}  // namespace spheredepth
