#include "spheredepth/validation.hpp"

#include "spheredepth/parallel.hpp"
#include "spheredepth/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace spheredepth::validation {

namespace {

std::uint64_t choose2(std::uint64_t m) { return m * (m - (m > 0 ? 1 : 0)) / 2; }

void check_same_size(std::size_t a, std::size_t b, const char* who) {
    if (a != b) {
        throw std::invalid_argument(std::string(who) + ": partitions have different lengths (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
    }
}

void check_pairs(std::size_t n, const char* who) {
    if (n < 2) throw std::invalid_argument(std::string(who) + ": requires n >= 2");
}

}  // namespace

PairCounts pair_counts(const Partition& p, const Partition& q) {
    check_same_size(p.size(), q.size(), "pair_counts");
    const std::uint64_t kq = q.num_clusters();
    std::unordered_map<std::uint64_t, std::uint64_t> cells;
    for (std::size_t i = 0; i < p.size(); ++i) {
        ++cells[static_cast<std::uint64_t>(p.label(i)) * kq + static_cast<std::uint64_t>(q.label(i))];
    }
    std::uint64_t together_both = 0;
    for (const auto& [key, count] : cells) together_both += choose2(count);
    std::uint64_t together_p = 0;
    for (std::size_t s : p.cluster_sizes()) together_p += choose2(s);
    std::uint64_t together_q = 0;
    for (std::size_t s : q.cluster_sizes()) together_q += choose2(s);

    PairCounts counts;
    counts.a = together_both;
    counts.b = together_p - together_both;
    counts.c = together_q - together_both;
    counts.d = choose2(p.size()) - counts.a - counts.b - counts.c;
    return counts;
}

PairCounts pair_counts_brute_force(const Partition& p, const Partition& q) {
    check_same_size(p.size(), q.size(), "pair_counts_brute_force");
    PairCounts counts;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const bool in_p = p.label(i) == p.label(j);
            const bool in_q = q.label(i) == q.label(j);
            if (in_p && in_q) {
                ++counts.a;
            } else if (in_p) {
                ++counts.b;
            } else if (in_q) {
                ++counts.c;
            } else {
                ++counts.d;
            }
        }
    }
    return counts;
}

double rand_index(const Partition& p, const Partition& q) {
    check_same_size(p.size(), q.size(), "rand_index");
    check_pairs(p.size(), "rand_index");
    const auto c = pair_counts(p, q);
    return static_cast<double>(c.a + c.d) / static_cast<double>(c.total());
}

double adjusted_rand_index(const PairCounts& counts) {
    const long double a = counts.a;
    const long double b = counts.b;
    const long double c = counts.c;
    const long double d = counts.d;
    const long double denom = b * b + c * c + 2.0L * a * d + (a + d) * (b + c);
    // The denominator vanishes only when b = c = 0 and ad = 0, i.e. the two
    // partitions pair exactly the same points.
    if (denom == 0.0L) return 1.0;
    return static_cast<double>(2.0L * (a * d - b * c) / denom);
}

double adjusted_rand_index(const Partition& p, const Partition& q) {
    check_same_size(p.size(), q.size(), "adjusted_rand_index");
    check_pairs(p.size(), "adjusted_rand_index");
    return adjusted_rand_index(pair_counts(p, q));
}

FuzzyPartition::FuzzyPartition(std::size_t n, std::size_t k, std::vector<double> memberships)
    : n_(n), k_(k), values_(std::move(memberships)) {
    if (k_ == 0) throw std::invalid_argument("FuzzyPartition: need at least one cluster");
    if (values_.size() != n_ * k_) throw std::invalid_argument("FuzzyPartition: expected n*K memberships");
    for (std::size_t i = 0; i < n_; ++i) {
        double total = 0.0;
        for (double w : row(i)) {
            if (!(w >= 0.0 && w <= 1.0)) {
                throw std::invalid_argument("FuzzyPartition: membership outside [0, 1] in row " + std::to_string(i));
            }
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::invalid_argument("FuzzyPartition: row " + std::to_string(i) + " sums to " +
                                        std::to_string(total));
        }
    }
}

FuzzyPartition FuzzyPartition::from_crisp(const Partition& p) {
    const std::size_t k = p.num_clusters();
    std::vector<double> values(p.size() * k, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) values[i * k + static_cast<std::size_t>(p.label(i))] = 1.0;
    return FuzzyPartition(p.size(), k, std::move(values));
}

Partition FuzzyPartition::harden() const {
    std::vector<int> labels(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto r = row(i);
        labels[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return Partition::from_any_labels(labels);
}

double fuzzy_equivalence(std::span<const double> wi, std::span<const double> wj) {
    if (wi.size() != wj.size()) throw std::invalid_argument("fuzzy_equivalence: rows differ in length");
    double l1 = 0.0;
    for (std::size_t k = 0; k < wi.size(); ++k) l1 += std::abs(wi[k] - wj[k]);
    return 1.0 - 0.5 * l1;
}

namespace {

// Full symmetric n x n matrix of E(i, j).
std::vector<double> equivalence_matrix(const FuzzyPartition& w) {
    const std::size_t n = w.size();
    std::vector<double> e(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = fuzzy_equivalence(w.row(i), w.row(j));
            e[i * n + j] = v;
            e[j * n + i] = v;
        }
    }
    return e;
}

double ndc_from(const std::vector<double>& eg, const std::vector<double>& eh, std::size_t n,
                std::span<const std::size_t> perm) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const double* g_row = eg.data() + i * n;
        const double* h_row = eh.data() + perm[i] * n;
        for (std::size_t j = i + 1; j < n; ++j) total += std::abs(g_row[j] - h_row[perm[j]]);
    }
    const long double pairs = 0.5L * static_cast<long double>(n) * static_cast<long double>(n - 1);
    return static_cast<double>(1.0L - total / pairs);
}

void check_fuzzy_pair(const FuzzyPartition& g, const FuzzyPartition& h, const char* who) {
    check_same_size(g.size(), h.size(), who);
    check_pairs(g.size(), who);
}

}  // namespace

double ndc(const FuzzyPartition& g, const FuzzyPartition& h) {
    check_fuzzy_pair(g, h, "ndc");
    const std::size_t n = g.size();
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            total += std::abs(fuzzy_equivalence(g.row(i), g.row(j)) - fuzzy_equivalence(h.row(i), h.row(j)));
        }
    }
    const long double pairs = 0.5L * static_cast<long double>(n) * static_cast<long double>(n - 1);
    return static_cast<double>(1.0L - total / pairs);
}

AciResult aci_detailed(const FuzzyPartition& g, const FuzzyPartition& h, std::size_t n_perm, std::uint64_t seed,
                       std::size_t workers) {
    check_fuzzy_pair(g, h, "aci");
    if (n_perm < 1) throw std::invalid_argument("aci: n_perm must be >= 1");
    const std::size_t n = g.size();
    const auto eg = equivalence_matrix(g);
    const auto eh = equivalence_matrix(h);

    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    const double observed = ndc_from(eg, eh, n, identity);

    std::vector<double> replicas(n_perm);
    parallel_for(n_perm, workers, [&](std::size_t r) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
        std::vector<std::size_t> perm = identity;
        std::shuffle(perm.begin(), perm.end(), rng);
        replicas[r] = ndc_from(eg, eh, n, perm);
    });
    long double sum = 0.0L;
    for (double v : replicas) sum += v;
    const double mean = static_cast<double>(sum / static_cast<long double>(n_perm));

    const double denom = 1.0 - mean;
    if (denom < 1e-12) {
        throw DegenerateIndex("aci: permutation mean NDC is 1, chance adjustment undefined");
    }
    return {(observed - mean) / denom, observed, mean};
}

}  // namespace spheredepth::validation
