#include "spheredepth/dbmca.hpp"

#include "spheredepth/parallel.hpp"
#include "spheredepth/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace spheredepth::dbmca {

namespace {

void check_k(std::size_t k, std::size_t n, const char* who) {
    if (k < 1 || k > n) {
        throw std::invalid_argument(std::string(who) + ": k must lie in [1, n] (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
}

// Row views of the medoids; streaming sources fill one buffer per medoid.
struct MedoidRows {
    std::vector<std::vector<double>> scratch;
    std::vector<std::span<const double>> rows;

    MedoidRows(const SimilaritySource& sim, std::span<const std::size_t> medoids)
        : scratch(medoids.size()), rows(medoids.size()) {
        for (std::size_t k = 0; k < medoids.size(); ++k) rows[k] = sim.row(medoids[k], scratch[k]);
    }
};

}  // namespace

std::string_view to_string(Seeding seeding) {
    return seeding == Seeding::Depth ? "depth" : "spread";
}

Seeding parse_seeding(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "depth") return Seeding::Depth;
    if (lower == "spread") return Seeding::Spread;
    throw std::invalid_argument("unknown seeding '" + std::string(text) + "' (expected depth or spread)");
}

std::vector<std::size_t> init_medoids(const SimilaritySource& sim, std::size_t k, std::uint64_t seed,
                                      Seeding seeding) {
    const std::size_t n = sim.size();
    check_k(k, n, "init_medoids");
    Rng rng(seed);

    std::vector<std::size_t> medoids;
    medoids.reserve(k);
    std::vector<bool> chosen(n, false);
    medoids.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    chosen[medoids.back()] = true;

    // Similarity of every point to its closest medoid, and that medoid's slot.
    std::vector<double> best(n);
    std::vector<std::size_t> owner(n, 0);
    std::vector<double> scratch;
    {
        const auto row = sim.row(medoids.front(), scratch);
        std::copy(row.begin(), row.end(), best.begin());
    }

    std::vector<double> weights(n);
    std::vector<double> neighbourhood_mass;
    const double top = max_depth(sim.kind());
    while (medoids.size() < k) {
        if (seeding == Seeding::Depth) {
            // P(i) proportional to sim(x_i, m_p(i)) / sum_{h in M_p(i)} sim(x_h, m_p(i)),
            // where M_p is the neighbourhood (closest points, medoid included) of m_p.
            neighbourhood_mass.assign(medoids.size(), 0.0);
            for (std::size_t i = 0; i < n; ++i) neighbourhood_mass[owner[i]] += best[i];
            for (std::size_t i = 0; i < n; ++i) {
                const double mass = neighbourhood_mass[owner[i]];
                weights[i] = (chosen[i] || !(mass > 0.0)) ? 0.0 : best[i] / mass;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) weights[i] = chosen[i] ? 0.0 : std::max(0.0, top - best[i]);
        }
        std::size_t next = draw_weighted(rng, weights);
        if (next == n) {
            // Every candidate has zero weight: fall back to a uniform draw.
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) pool.push_back(i);
            }
            next = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        }
        chosen[next] = true;
        medoids.push_back(next);

        const std::size_t slot = medoids.size() - 1;
        const auto row = sim.row(next, scratch);
        for (std::size_t i = 0; i < n; ++i) {
            if (row[i] > best[i]) {
                best[i] = row[i];
                owner[i] = slot;
            }
        }
        best[next] = std::max(best[next], row[next]);
        owner[next] = slot;
    }
    return medoids;
}

Partition assign(const SimilaritySource& sim, std::span<const std::size_t> medoids) {
    const std::size_t n = sim.size();
    if (medoids.empty()) throw std::invalid_argument("assign: no medoids");
    {
        std::vector<std::size_t> sorted(medoids.begin(), medoids.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.back() >= n) {
            throw std::invalid_argument("assign: medoids must be distinct sample indices");
        }
    }
    const MedoidRows rows(sim, medoids);
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = rows.rows[0][i];
        int label = 0;
        for (std::size_t k = 1; k < medoids.size(); ++k) {
            if (rows.rows[k][i] > best) {
                best = rows.rows[k][i];
                label = static_cast<int>(k);
            }
        }
        labels[i] = label;
    }
    for (std::size_t k = 0; k < medoids.size(); ++k) labels[medoids[k]] = static_cast<int>(k);
    return Partition(std::move(labels));
}

namespace {

std::vector<std::size_t> refine_impl(const SimilaritySource& sim, const Partition& partition,
                                     std::optional<std::span<const std::size_t>> incumbent) {
    if (partition.size() != sim.size()) {
        throw std::invalid_argument("refine: partition size does not match the sample");
    }
    const auto members = partition.members();
    if (incumbent && incumbent->size() != members.size()) {
        throw std::invalid_argument("refine: one incumbent medoid per cluster required");
    }
    std::vector<std::size_t> medoids(members.size());
    std::vector<double> scratch;
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& cluster = members[k];
        std::size_t best_index = cluster.front();
        long double best_score = -1.0L;
        long double incumbent_score = -1.0L;
        const std::size_t current = incumbent ? (*incumbent)[k] : sim.size();
        for (std::size_t c : cluster) {
            const auto row = sim.row(c, scratch);
            long double score = 0.0L;
            for (std::size_t j : cluster) score += row[j];
            if (score > best_score) {
                best_score = score;
                best_index = c;
            }
            if (c == current) incumbent_score = score;
        }
        medoids[k] = (incumbent_score >= best_score) ? current : best_index;
    }
    return medoids;
}

}  // namespace

std::vector<std::size_t> refine(const SimilaritySource& sim, const Partition& partition) {
    return refine_impl(sim, partition, std::nullopt);
}

std::vector<std::size_t> refine(const SimilaritySource& sim, const Partition& partition,
                                std::span<const std::size_t> incumbent) {
    return refine_impl(sim, partition, incumbent);
}

double objective(const SimilaritySource& sim, const Partition& partition, std::span<const std::size_t> medoids) {
    if (medoids.size() != partition.num_clusters()) {
        throw std::invalid_argument("objective: one medoid per cluster required");
    }
    const MedoidRows rows(sim, medoids);
    long double total = 0.0L;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        total += rows.rows[static_cast<std::size_t>(partition.label(i))][i];
    }
    return static_cast<double>(total);
}

ClusterModel fit(const SimilaritySource& sim, std::size_t k, std::uint64_t seed, const FitOptions& options) {
    check_k(k, sim.size(), "fit");
    auto medoids = init_medoids(sim, k, seed, options.seeding);
    ClusterModel model{assign(sim, medoids), {}, sim.kind(), {}, 0, false};
    model.objective_trace.push_back(objective(sim, model.partition, medoids));

    while (model.iterations < options.max_iter) {
        auto refined = refine(sim, model.partition, medoids);
        ++model.iterations;
        if (refined == medoids) {
            model.converged = true;
            break;
        }
        medoids = std::move(refined);
        model.partition = assign(sim, medoids);
        model.objective_trace.push_back(objective(sim, model.partition, medoids));
    }
    model.medoid_indices = std::move(medoids);
    if (options.compute_silhouette && k >= 2) model.silhouette = silhouette(sim, model.partition).mean;
    return model;
}

SilhouetteReport silhouette(const SimilaritySource& sim, const Partition& partition) {
    const std::size_t n = partition.size();
    const std::size_t K = partition.num_clusters();
    if (K < 2) throw std::invalid_argument("silhouette: undefined for fewer than two clusters");
    if (n != sim.size()) throw std::invalid_argument("silhouette: partition size does not match the sample");

    const auto sizes = partition.cluster_sizes();
    SilhouetteReport report;
    report.per_point.assign(n, 0.0);
    std::vector<long double> sums(K);
    std::vector<double> scratch;
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(partition.label(i));
        if (sizes[own] == 1) continue;
        const auto row = sim.row(i, scratch);
        std::fill(sums.begin(), sums.end(), 0.0L);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[static_cast<std::size_t>(partition.label(j))] += row[j];
        }
        const double a = static_cast<double>(sums[own] / static_cast<long double>(sizes[own] - 1));
        double b = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < K; ++c) {
            if (c != own) b = std::max(b, static_cast<double>(sums[c] / static_cast<long double>(sizes[c])));
        }
        double s = 0.0;
        if (a > b) {
            s = 1.0 - b / a;
        } else if (a < b) {
            s = a / b - 1.0;
        }
        report.per_point[i] = s;
        total += s;
    }
    report.mean = static_cast<double>(total / static_cast<long double>(n));
    return report;
}

const ClusterModel& Selection::best() const {
    const auto* m = model_for(best_k);
    if (m == nullptr) throw std::logic_error("Selection: no model for best_k");
    return *m;
}

const ClusterModel* Selection::model_for(std::size_t k) const {
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] == k) return &models[i];
    }
    return nullptr;
}

namespace {

std::uint64_t restart_seed(std::uint64_t seed, std::size_t k, std::size_t restart) {
    return derive_seed(seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(restart)});
}

ClusterModel pick_best(std::vector<std::optional<ClusterModel>>& runs, std::size_t first, std::size_t count) {
    std::size_t best = first;
    for (std::size_t r = first + 1; r < first + count; ++r) {
        if (runs[r]->objective() > runs[best]->objective()) best = r;
    }
    return std::move(*runs[best]);
}

}  // namespace

ClusterModel fit_best_of(const SimilaritySource& sim, std::size_t k, std::uint64_t seed,
                         const SelectOptions& options) {
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    FitOptions fit_options = options.fit;
    fit_options.compute_silhouette = false;
    std::vector<std::optional<ClusterModel>> runs(restarts);
    parallel_for(restarts, options.workers,
                 [&](std::size_t r) { runs[r] = fit(sim, k, restart_seed(seed, k, r), fit_options); });
    ClusterModel model = pick_best(runs, 0, restarts);
    if (options.fit.compute_silhouette && k >= 2) model.silhouette = silhouette(sim, model.partition).mean;
    return model;
}

Selection select_k(const SimilaritySource& sim, std::span<const std::size_t> k_range, std::uint64_t seed,
                   const SelectOptions& options) {
    if (k_range.empty()) throw std::invalid_argument("select_k: empty k range");
    const std::size_t n = sim.size();
    for (std::size_t k : k_range) {
        if (k < 2 || k > n) {
            throw std::invalid_argument("select_k: every k must lie in [2, n] (got " + std::to_string(k) + ")");
        }
    }
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    FitOptions fit_options = options.fit;
    fit_options.compute_silhouette = false;

    // One job per (k, restart); the reduction below runs in a fixed order.
    const std::size_t jobs = k_range.size() * restarts;
    std::vector<std::optional<ClusterModel>> runs(jobs);
    parallel_for(jobs, options.workers, [&](std::size_t job) {
        const std::size_t k = k_range[job / restarts];
        runs[job] = fit(sim, k, restart_seed(seed, k, job % restarts), fit_options);
    });

    Selection selection;
    selection.ks.assign(k_range.begin(), k_range.end());
    selection.models.reserve(k_range.size());
    for (std::size_t idx = 0; idx < k_range.size(); ++idx) {
        selection.models.push_back(pick_best(runs, idx * restarts, restarts));
    }
    parallel_for(selection.models.size(), options.workers, [&](std::size_t idx) {
        auto& m = selection.models[idx];
        m.silhouette = silhouette(sim, m.partition).mean;
    });

    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < selection.ks.size(); ++idx) {
        const double s = selection.models[idx].silhouette;
        const std::size_t k = selection.ks[idx];
        if (s > best_score || (s == best_score && k < selection.best_k)) {
            best_score = s;
            selection.best_k = k;
        }
    }
    return selection;
}

}  // namespace spheredepth::dbmca
