#include "spheredepth/random.hpp"

#include <numeric>

namespace spheredepth {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

std::vector<double> standard_normal_vector(Rng& rng, std::size_t d) {
    std::normal_distribution<double> normal;
    std::vector<double> v(d);
    for (double& c : v) c = normal(rng);
    return v;
}

double uniform01(Rng& rng) {
    // 53 random mantissa bits.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw_weighted(Rng& rng, const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) return weights.size();
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive;
}

}  // namespace spheredepth
