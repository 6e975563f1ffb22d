#pragma once

#include "spheredepth/depth.hpp"
#include "spheredepth/partition.hpp"
#include "spheredepth/random.hpp"
#include "spheredepth/sphere.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/// Factorial vMF simulation: cluster count x dimension x noise x center
/// structure x replicate, DBMCA with silhouette selection on each dataset.
namespace spheredepth::sim {

enum class Noise { Low, Medium, High };

inline constexpr Noise kAllNoise[] = {Noise::Low, Noise::Medium, Noise::High};

std::string_view to_string(Noise noise);
Noise parse_noise(std::string_view text);

struct KappaRange {
    double lo;
    double hi;
};

/// Low [10, 12], Medium [6, 8], High [2, 4].
KappaRange kappa_range(Noise noise);

struct SimCell {
    int n_clusters = 2;
    std::size_t dim = 3;
    Noise noise = Noise::Low;
    bool structured = true;
    int replicate = 0;
    std::size_t sample_size = 500;

    /// Stable identifier, e.g. k2-d3-low-s-r0 (u for unstructured).
    std::string id() const;
    friend bool operator==(const SimCell&, const SimCell&) = default;
};

/// {2,3,4,5} x {3,5,10} x {Low,Medium,High} x {structured, unstructured} x
/// 10 replicates = 720 cells, in that nesting order.
std::vector<SimCell> full_design();

/// Subset of the design; unset fields match anything.
struct CellFilter {
    std::optional<int> n_clusters;
    std::optional<std::size_t> dim;
    std::optional<Noise> noise;
    std::optional<bool> structured;
    std::optional<int> replicate;

    bool matches(const SimCell& cell) const;
};

/// Parses "clusters=2,dim=3,noise=low,structured=true,replicate=0" (any
/// subset, any order). Throws std::invalid_argument on unknown keys.
CellFilter parse_filter(std::string_view text);

std::vector<SimCell> filter_design(const std::vector<SimCell>& design, const CellFilter& filter);

double draw_kappa(Noise noise, Rng& rng);
double draw_kappa(Noise noise, std::uint64_t seed);

/// Raised when rejection sampling exhausts its draw budget.
class PlacementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cosine-distance bands the structured centers must respect.
struct CenterConstraint {
    std::size_t center;
    std::vector<std::size_t> against;
    double lo;
    double hi;
};

/// Constraints binding centers 0..k-1:
///   c2 vs c1 in [1.7, 2], c3 vs c1 and c2 in [0.8, 1.2],
///   c4 vs c3 in [1.7, 2], c5 vs c1..c4 in [0.5, 0.8].
std::vector<CenterConstraint> structured_constraints(std::size_t k);

/// Sequential rejection sampling from the uniform sphere. A stage that finds
/// nothing in kStageBudget draws restarts the placement from the first
/// center; more than kDrawCap draws overall throws PlacementError.
std::vector<UnitVector> place_structured_centers(std::size_t k, std::size_t dim, std::uint64_t seed);

inline constexpr std::size_t kStageBudget = 2000;
inline constexpr std::size_t kDrawCap = 1000000;

/// True when every structured constraint holds.
bool verify_structured_centers(const std::vector<UnitVector>& centers);

/// k independent uniform draws.
std::vector<UnitVector> place_unstructured_centers(std::size_t k, std::size_t dim, std::uint64_t seed);

struct SimDataset {
    std::vector<UnitVector> points;
    Partition true_labels;
    std::vector<UnitVector> centers;
    std::vector<double> kappas;
    std::vector<double> proportions;
};

/// Hash of (master_seed, n_clusters, dim, noise, structured, replicate).
std::uint64_t dataset_seed(const SimCell& cell, std::uint64_t master_seed);

/// Proportions ~ Dirichlet(5), redrawn until all are >= 0.5/K; cluster
/// sizes by largest remainder; one kappa per cluster; points shuffled.
SimDataset generate_dataset(const SimCell& cell, std::uint64_t master_seed);

struct PerK {
    std::size_t k;
    double mean_silhouette;
    double ari;
};

struct SimResult {
    SimCell cell;
    DepthKind kind = DepthKind::Cosine;
    std::size_t selected_k = 0;
    double ari_selected = 0.0;
    double ari_true_k = 0.0;
    double mean_silhouette = 0.0;
    std::int64_t runtime_ms = 0;
    /// Empty on success.
    std::string error;
    std::vector<PerK> per_k;
};

struct StudyOptions {
    std::vector<DepthKind> kinds{DepthKind::Arc, DepthKind::Cosine, DepthKind::Chord};
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    std::size_t k_min = 2;
    std::size_t k_max = 10;
    std::size_t restarts = 10;
    std::size_t max_iter = 100;
    /// Wall-clock times break byte-identical output, so they are written as
    /// 0 unless requested.
    bool record_runtime = false;
};

/// One cell, all requested kinds, on a shared dataset. Failures are caught
/// and reported in SimResult::error.
std::vector<SimResult> run_cell(const SimCell& cell, const StudyOptions& options);

/// Runs every cell on a worker pool; rows are streamed to the sinks (either
/// may be null) in design order as soon as each prefix is complete.
std::vector<SimResult> run_study(const std::vector<SimCell>& design, const StudyOptions& options,
                                 std::ostream* results_csv = nullptr, std::ostream* per_k_csv = nullptr);

void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const SimResult& r);
void write_per_k_header(std::ostream& out);
void write_per_k_rows(std::ostream& out, const SimResult& r);

}  // namespace spheredepth::sim
