#include "spheredepth/simharness.hpp"

#include "spheredepth/dbmca.hpp"
#include "spheredepth/parallel.hpp"
#include "spheredepth/validation.hpp"
#include "spheredepth/vmf.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <ostream>

namespace spheredepth::sim {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

long parse_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long out = 0;
    try {
        out = std::stol(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
    return out;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

std::string_view to_string(Noise noise) {
    switch (noise) {
        case Noise::Low: return "low";
        case Noise::Medium: return "medium";
        case Noise::High: return "high";
    }
    return "?";
}

Noise parse_noise(std::string_view text) {
    const auto t = lower(text);
    if (t == "low") return Noise::Low;
    if (t == "medium") return Noise::Medium;
    if (t == "high") return Noise::High;
    throw std::invalid_argument("unknown noise level '" + std::string(text) + "' (expected low, medium or high)");
}

KappaRange kappa_range(Noise noise) {
    switch (noise) {
        case Noise::Low: return {10.0, 12.0};
        case Noise::Medium: return {6.0, 8.0};
        case Noise::High: return {2.0, 4.0};
    }
    throw std::invalid_argument("kappa_range: invalid noise level");
}

std::string SimCell::id() const {
    return "k" + std::to_string(n_clusters) + "-d" + std::to_string(dim) + "-" + std::string(to_string(noise)) +
           (structured ? "-s" : "-u") + "-r" + std::to_string(replicate);
}

std::vector<SimCell> full_design() {
    std::vector<SimCell> design;
    design.reserve(720);
    for (int k : {2, 3, 4, 5}) {
        for (std::size_t d : {3u, 5u, 10u}) {
            for (Noise noise : kAllNoise) {
                for (bool structured : {true, false}) {
                    for (int r = 0; r < 10; ++r) {
                        design.push_back(SimCell{k, d, noise, structured, r, 500});
                    }
                }
            }
        }
    }
    return design;
}

bool CellFilter::matches(const SimCell& cell) const {
    return (!n_clusters || *n_clusters == cell.n_clusters) && (!dim || *dim == cell.dim) &&
           (!noise || *noise == cell.noise) && (!structured || *structured == cell.structured) &&
           (!replicate || *replicate == cell.replicate);
}

CellFilter parse_filter(std::string_view text) {
    CellFilter filter;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        const auto item = trim(text.substr(pos, comma - pos));
        pos = comma + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("filter item '" + item + "' lacks '='");
        const auto key = lower(trim(item.substr(0, eq)));
        const auto value = lower(trim(item.substr(eq + 1)));
        if (key == "clusters" || key == "k" || key == "n_clusters") {
            filter.n_clusters = static_cast<int>(parse_integer(key, value));
        } else if (key == "dim" || key == "d") {
            const long d = parse_integer(key, value);
            if (d < 2) throw std::invalid_argument("dim must be >= 2");
            filter.dim = static_cast<std::size_t>(d);
        } else if (key == "noise") {
            filter.noise = parse_noise(value);
        } else if (key == "structured") {
            filter.structured = parse_bool(value);
        } else if (key == "replicate") {
            filter.replicate = static_cast<int>(parse_integer(key, value));
        } else {
            throw std::invalid_argument("unknown filter key '" + key + "'");
        }
    }
    return filter;
}

std::vector<SimCell> filter_design(const std::vector<SimCell>& design, const CellFilter& filter) {
    std::vector<SimCell> out;
    std::copy_if(design.begin(), design.end(), std::back_inserter(out),
                 [&](const SimCell& c) { return filter.matches(c); });
    return out;
}

double draw_kappa(Noise noise, Rng& rng) {
    const auto [lo, hi] = kappa_range(noise);
    return lo + (hi - lo) * uniform01(rng);
}

double draw_kappa(Noise noise, std::uint64_t seed) {
    Rng rng(seed);
    return draw_kappa(noise, rng);
}

std::vector<CenterConstraint> structured_constraints(std::size_t k) {
    std::vector<CenterConstraint> all{
        {1, {0}, 1.7, 2.0},
        {2, {0, 1}, 0.8, 1.2},
        {3, {2}, 1.7, 2.0},
        {4, {0, 1, 2, 3}, 0.5, 0.8},
    };
    std::vector<CenterConstraint> out;
    for (auto& c : all) {
        if (c.center < k) out.push_back(std::move(c));
    }
    return out;
}

namespace {

bool satisfies(const UnitVector& x, const std::vector<UnitVector>& centers, const CenterConstraint& c) {
    return std::all_of(c.against.begin(), c.against.end(), [&](std::size_t j) {
        const double dist = cosine_distance(x, centers[j]);
        return dist >= c.lo && dist <= c.hi;
    });
}

void check_k_dim(std::size_t k, std::size_t dim, const char* who) {
    if (dim < 2) throw std::invalid_argument(std::string(who) + ": dim must be >= 2");
    if (k < 1) throw std::invalid_argument(std::string(who) + ": k must be >= 1");
}

}  // namespace

std::vector<UnitVector> place_structured_centers(std::size_t k, std::size_t dim, std::uint64_t seed) {
    check_k_dim(k, dim, "place_structured_centers");
    if (k < 2 || k > 5) throw std::invalid_argument("place_structured_centers: k must lie in 2..5");
    const auto constraints = structured_constraints(k);
    Rng rng(seed);
    std::size_t draws = 0;
    for (;;) {
        std::vector<UnitVector> centers;
        centers.push_back(vmf::draw_uniform(dim, rng));
        ++draws;
        bool stalled = false;
        for (const auto& c : constraints) {
            std::size_t tries = 0;
            for (;;) {
                if (draws >= kDrawCap) {
                    throw PlacementError("place_structured_centers: no feasible placement of " + std::to_string(k) +
                                         " centers in dim " + std::to_string(dim) + " within " +
                                         std::to_string(kDrawCap) + " draws");
                }
                auto x = vmf::draw_uniform(dim, rng);
                ++draws;
                if (satisfies(x, centers, c)) {
                    centers.push_back(std::move(x));
                    break;
                }
                if (++tries >= kStageBudget) {
                    stalled = true;
                    break;
                }
            }
            if (stalled) break;
        }
        if (!stalled) return centers;
    }
}

bool verify_structured_centers(const std::vector<UnitVector>& centers) {
    for (const auto& c : structured_constraints(centers.size())) {
        if (!satisfies(centers[c.center], centers, c)) return false;
    }
    return true;
}

std::vector<UnitVector> place_unstructured_centers(std::size_t k, std::size_t dim, std::uint64_t seed) {
    check_k_dim(k, dim, "place_unstructured_centers");
    Rng rng(seed);
    std::vector<UnitVector> centers;
    for (std::size_t i = 0; i < k; ++i) centers.push_back(vmf::draw_uniform(dim, rng));
    return centers;
}

std::uint64_t dataset_seed(const SimCell& cell, std::uint64_t master_seed) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(cell.n_clusters), cell.dim,
                                     static_cast<std::uint64_t>(cell.noise), cell.structured ? 1u : 0u,
                                     static_cast<std::uint64_t>(cell.replicate)});
}

SimDataset generate_dataset(const SimCell& cell, std::uint64_t master_seed) {
    if (cell.n_clusters < 1) throw std::invalid_argument("generate_dataset: n_clusters must be >= 1");
    const auto k = static_cast<std::size_t>(cell.n_clusters);
    const std::size_t n = cell.sample_size;
    if (n < k) throw std::invalid_argument("generate_dataset: sample_size below n_clusters");
    const std::uint64_t seed = dataset_seed(cell, master_seed);

    SimDataset ds{{}, Partition(std::vector<int>{0}), {}, {}, {}};
    ds.centers = cell.structured && k >= 2 ? place_structured_centers(k, cell.dim, derive_seed(seed, {1}))
                                           : place_unstructured_centers(k, cell.dim, derive_seed(seed, {1}));

    Rng rng(derive_seed(seed, {2}));
    const double floor = 0.5 / static_cast<double>(k);
    std::gamma_distribution<double> gamma(5.0, 1.0);
    std::vector<double> p(k);
    do {
        double total = 0.0;
        for (auto& v : p) total += (v = gamma(rng));
        for (auto& v : p) v /= total;
    } while (*std::min_element(p.begin(), p.end()) < floor);
    ds.proportions = p;

    // Largest-remainder rounding, ties to the lower cluster.
    std::vector<std::size_t> sizes(k);
    std::vector<std::pair<double, std::size_t>> remainders(k);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double exact = p[c] * static_cast<double>(n);
        sizes[c] = static_cast<std::size_t>(std::floor(exact));
        remainders[c] = {exact - static_cast<double>(sizes[c]), c};
        assigned += sizes[c];
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++sizes[remainders[r % k].second];

    for (std::size_t c = 0; c < k; ++c) ds.kappas.push_back(draw_kappa(cell.noise, rng));

    std::vector<UnitVector> ordered;
    std::vector<int> ordered_labels;
    ordered.reserve(n);
    for (std::size_t c = 0; c < k; ++c) {
        const vmf::VmfParams params(ds.centers[c], ds.kappas[c]);
        for (std::size_t i = 0; i < sizes[c]; ++i) {
            ordered.push_back(vmf::draw(params, rng));
            ordered_labels.push_back(static_cast<int>(c));
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> labels(n);
    ds.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.points.push_back(ordered[order[i]]);
        labels[i] = ordered_labels[order[i]];
    }
    ds.true_labels = Partition(std::move(labels));
    return ds;
}

std::vector<SimResult> run_cell(const SimCell& cell, const StudyOptions& options) {
    std::vector<SimResult> results;
    for (DepthKind kind : options.kinds) {
        SimResult r;
        r.cell = cell;
        r.kind = kind;
        results.push_back(std::move(r));
    }

    std::optional<SimDataset> ds;
    try {
        ds = generate_dataset(cell, options.master_seed);
    } catch (const std::exception& e) {
        for (auto& r : results) r.error = std::string("generate: ") + e.what();
        return results;
    }

    const std::uint64_t fit_seed = derive_seed(dataset_seed(cell, options.master_seed), {3});
    for (auto& r : results) {
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto sim = depth_matrix(ds->points, r.kind);
            std::vector<std::size_t> ks;
            const std::size_t k_hi = std::min(options.k_max, ds->points.size());
            for (std::size_t k = options.k_min; k <= k_hi; ++k) ks.push_back(k);
            dbmca::SelectOptions select;
            select.restarts = options.restarts;
            select.fit.max_iter = options.max_iter;
            const auto selection = dbmca::select_k(sim, ks, fit_seed, select);

            for (std::size_t idx = 0; idx < selection.ks.size(); ++idx) {
                const auto& m = selection.models[idx];
                r.per_k.push_back(
                    {selection.ks[idx], m.silhouette, validation::adjusted_rand_index(m.partition, ds->true_labels)});
            }
            r.selected_k = selection.best_k;
            r.mean_silhouette = selection.best().silhouette;
            r.ari_selected = validation::adjusted_rand_index(selection.best().partition, ds->true_labels);

            const auto true_k = static_cast<std::size_t>(cell.n_clusters);
            if (const auto* m = selection.model_for(true_k)) {
                r.ari_true_k = validation::adjusted_rand_index(m->partition, ds->true_labels);
            } else {
                const auto m_true = dbmca::fit_best_of(sim, true_k, fit_seed, select);
                r.ari_true_k = validation::adjusted_rand_index(m_true.partition, ds->true_labels);
            }
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        if (options.record_runtime) {
            r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                                 start)
                               .count();
        }
    }
    return results;
}

std::vector<SimResult> run_study(const std::vector<SimCell>& design, const StudyOptions& options,
                                 std::ostream* results_csv, std::ostream* per_k_csv) {
    if (design.empty()) throw std::invalid_argument("run_study: empty design");
    if (options.kinds.empty()) throw std::invalid_argument("run_study: no depth kinds");
    if (options.k_min < 2 || options.k_max < options.k_min) {
        throw std::invalid_argument("run_study: k range must satisfy 2 <= k_min <= k_max");
    }
    if (results_csv) write_results_header(*results_csv);
    if (per_k_csv) write_per_k_header(*per_k_csv);

    std::vector<std::optional<std::vector<SimResult>>> slots(design.size());
    std::mutex sink;
    std::size_t next_to_write = 0;
    parallel_for(design.size(), options.workers, [&](std::size_t i) {
        auto rows = run_cell(design[i], options);
        std::lock_guard lock(sink);
        slots[i] = std::move(rows);
        while (next_to_write < slots.size() && slots[next_to_write]) {
            for (const auto& r : *slots[next_to_write]) {
                if (results_csv) write_result_row(*results_csv, r);
                if (per_k_csv) write_per_k_rows(*per_k_csv, r);
            }
            if (results_csv) results_csv->flush();
            ++next_to_write;
        }
    });

    std::vector<SimResult> all;
    all.reserve(design.size() * options.kinds.size());
    for (auto& s : slots) {
        for (auto& r : *s) all.push_back(std::move(r));
    }
    return all;
}

void write_results_header(std::ostream& out) {
    out << "cell_id,n_clusters,dim,noise,structured,replicate,depth_kind,selected_k,ari_selected,ari_true_k,"
           "mean_silhouette,runtime_ms,error\n";
}

void write_result_row(std::ostream& out, const SimResult& r) {
    const bool ok = r.error.empty();
    out << r.cell.id() << ',' << r.cell.n_clusters << ',' << r.cell.dim << ',' << to_string(r.cell.noise) << ','
        << (r.cell.structured ? "true" : "false") << ',' << r.cell.replicate << ',' << to_string(r.kind) << ','
        << (ok ? std::to_string(r.selected_k) : "NA") << ',' << (ok ? format_real(r.ari_selected) : "NA") << ','
        << (ok ? format_real(r.ari_true_k) : "NA") << ',' << (ok ? format_real(r.mean_silhouette) : "NA") << ','
        << r.runtime_ms << ',' << csv_field(r.error) << '\n';
}

void write_per_k_header(std::ostream& out) { out << "cell_id,depth_kind,k,mean_silhouette,ari\n"; }

void write_per_k_rows(std::ostream& out, const SimResult& r) {
    for (const auto& pk : r.per_k) {
        out << r.cell.id() << ',' << to_string(r.kind) << ',' << pk.k << ',' << format_real(pk.mean_silhouette)
            << ',' << format_real(pk.ari) << '\n';
    }
}

}  // namespace spheredepth::sim
