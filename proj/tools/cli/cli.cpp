#include "cli.hpp"

#include "io.hpp"

#include "spheredepth/dbmca.hpp"
#include "spheredepth/depth.hpp"
#include "spheredepth/ingest.hpp"
#include "spheredepth/parallel.hpp"
#include "spheredepth/simharness.hpp"
#include "spheredepth/skmeans.hpp"
#include "spheredepth/validation.hpp"
#include "spheredepth/vmf.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

namespace spheredepth::cli {

namespace {

struct Common {
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::size_t workers = default_workers();
};

void add_common(CLI::App* sub, Common& c) {
    c.seed_opt = sub->add_option("--seed", c.seed, "Random seed (falls back to $SPHEREDEPTH_SEED, then 0)");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

std::uint64_t resolve_seed(const Common& c) {
    if (c.seed_opt->count() > 0) return c.seed;
    if (const char* env = std::getenv("SPHEREDEPTH_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("SPHEREDEPTH_SEED is not an unsigned integer: '") + env + "'");
    }
    return 0;
}

// Comment header: tool version, then every option of the subcommand as it
// was resolved (given value or default).
void write_header(std::ostream& out, const CLI::App* sub, std::uint64_t seed) {
    std::string path = sub->get_name();
    for (const auto* p = sub->get_parent(); p && p->get_parent(); p = p->get_parent()) path = p->get_name() + " " + path;
    out << "# spheredepth " << kVersion << " " << path << "\n#";
    for (const auto* opt : sub->get_options()) {
        const auto name = opt->get_single_name();
        if (name == "help" || name == "seed") continue;
        std::string value;
        if (opt->count() > 0) {
            const auto& results = opt->results();
            for (std::size_t i = 0; i < results.size(); ++i) value += (i ? ";" : "") + results[i];
            if (opt->get_type_size() == 0 && value.empty()) value = "true";
        } else {
            value = opt->get_default_str();
            if (value.empty()) value = opt->get_type_size() == 0 ? "false" : "-";
        }
        out << ' ' << name << '=' << value;
    }
    out << " seed=" << seed << '\n';
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot write " + path);
        }
        stream_ = file_ ? file_.get() : &fallback;
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

std::vector<std::size_t> parse_k_range(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
        std::size_t used = 0;
        const auto lo = std::stoul(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("bad lower bound");
        const auto hi = std::stoul(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("bad upper bound");
        if (lo < 2 || hi < lo) throw std::invalid_argument("need 2 <= lo <= hi");
        std::vector<std::size_t> ks;
        for (auto k = lo; k <= hi; ++k) ks.push_back(k);
        return ks;
    } catch (const std::exception& e) {
        throw UsageError("--k-range expects lo:hi with 2 <= lo <= hi, got '" + text + "' (" + e.what() + ")");
    }
}

DepthKind depth_arg(const std::string& text) {
    try {
        return parse_depth_kind(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

template <SpherePoint P>
std::unique_ptr<SimilaritySource> similarity_for(const std::vector<P>& points, DepthKind kind, std::size_t workers) {
    if (points.size() > kMaterializeLimit) {
        return std::make_unique<StreamingSimilarity<P>>(std::span<const P>(points), kind);
    }
    return std::make_unique<DepthMatrix>(depth_matrix(points, kind, workers));
}

// ---------------------------------------------------------------- generate

struct GenerateVmfArgs {
    std::size_t d = 3;
    double kappa = 1.0;
    std::size_t n = 100;
    std::vector<double> mu;
    std::string out;
    std::string labels;
    Common common;
};

int cmd_generate_vmf(const CLI::App* sub, const GenerateVmfArgs& a, std::ostream& stdout_) {
    const auto seed = resolve_seed(a.common);
    std::vector<double> mu = a.mu;
    if (mu.empty()) {
        mu.assign(a.d, 0.0);
        mu[0] = 1.0;
    }
    if (mu.size() != a.d) throw UsageError("--mu must have --d components");
    std::optional<UnitVector> mean;
    try {
        mean = normalize(mu);
    } catch (const std::exception&) {
        throw UsageError("--mu must be a nonzero vector");
    }
    const auto points = vmf::sample(vmf::VmfParams(*mean, a.kappa), a.n, seed);
    Output out(a.out, stdout_);
    write_header(*out, sub, seed);
    write_points(*out, points);
    if (!a.labels.empty()) {
        Output labels(a.labels, stdout_);
        write_header(*labels, sub, seed);
        for (std::size_t i = 0; i < a.n; ++i) *labels << "0\n";
    }
    return kOk;
}

struct GenerateCellArgs {
    int clusters = 2;
    std::size_t dim = 3;
    std::string noise = "low";
    bool structured = false;
    int replicate = 0;
    std::size_t n = 500;
    std::string out;
    std::string labels;
    Common common;
};

int cmd_generate_cell(const CLI::App* sub, const GenerateCellArgs& a, std::ostream& stdout_) {
    const auto seed = resolve_seed(a.common);
    sim::SimCell cell;
    cell.n_clusters = a.clusters;
    cell.dim = a.dim;
    try {
        cell.noise = sim::parse_noise(a.noise);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    cell.structured = a.structured;
    cell.replicate = a.replicate;
    cell.sample_size = a.n;
    const auto ds = sim::generate_dataset(cell, seed);
    Output out(a.out, stdout_);
    write_header(*out, sub, seed);
    write_points(*out, ds.points);
    if (!a.labels.empty()) {
        Output labels(a.labels, stdout_);
        write_header(*labels, sub, seed);
        for (int l : ds.true_labels.labels()) *labels << l << '\n';
    }
    return kOk;
}

// ------------------------------------------------------------------- depth

struct DepthArgs {
    std::string input;
    std::string depth = "cosine";
    std::string query;
    std::optional<double> alpha;
    std::string out;
    Common common;
};

template <SpherePoint P>
void depth_rows(std::ostream& out, const std::vector<P>& sample, const std::vector<P>& queries, DepthKind kind,
                std::optional<double> alpha) {
    out << "index,depth" << (alpha ? ",in_region" : "") << '\n';
    const auto& targets = queries.empty() ? sample : queries;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double v = sample_depth(targets[i], std::span<const P>(sample), kind).value;
        out << i << ',' << format_real(v);
        if (alpha) out << ',' << (v >= *alpha ? 1 : 0);
        out << '\n';
    }
}

int cmd_depth(const CLI::App* sub, const DepthArgs& a, std::ostream& stdout_) {
    const auto kind = depth_arg(a.depth);
    if (a.alpha && !(*a.alpha > 0.0)) throw UsageError("--alpha must be > 0");
    const auto points = read_points(a.input);
    Output out(a.out, stdout_);
    write_header(*out, sub, resolve_seed(a.common));
    if (points.is_sparse) {
        if (!a.query.empty()) throw UsageError("--query is only supported for dense input");
        depth_rows(*out, points.sparse, {}, kind, a.alpha);
    } else {
        std::vector<UnitVector> queries;
        if (!a.query.empty()) {
            queries = read_dense_points(a.query);
            if (queries.front().dim() != points.dim()) throw DimensionMismatch(queries.front().dim(), points.dim());
        }
        depth_rows(*out, points.dense, queries, kind, a.alpha);
    }
    return kOk;
}

// ----------------------------------------------------------------- cluster

struct ClusterArgs {
    std::string input;
    std::string method = "dbmca";
    std::string depth = "cosine";
    std::size_t k = 0;
    std::string k_range;
    std::size_t restarts = 10;
    std::size_t max_iter = 100;
    std::string seeding = "depth";
    std::string truth;
    std::string out_prefix;
    Common common;
};

struct ClusterOutcome {
    Partition partition{std::vector<int>{0}};
    std::vector<std::size_t> medoids;
    std::vector<double> trace;
    std::size_t iterations = 0;
    bool converged = false;
    double silhouette = std::numeric_limits<double>::quiet_NaN();
    // (k, silhouette, objective) when a range was searched.
    std::vector<std::tuple<std::size_t, double, double>> curve;
};

ClusterOutcome from_model(const dbmca::ClusterModel& m) {
    return {m.partition, m.medoid_indices, m.objective_trace, m.iterations, m.converged, m.silhouette, {}};
}

ClusterOutcome from_result(const skmeans::Result& r, double silhouette) {
    return {r.partition, {}, r.objective_trace, r.iterations, r.converged, silhouette, {}};
}

template <SpherePoint P>
ClusterOutcome cluster_points(const std::vector<P>& points, const ClusterArgs& a, DepthKind kind,
                              const std::vector<std::size_t>& ks, std::uint64_t seed) {
    const auto sim = similarity_for(points, kind, a.common.workers);
    const bool range = !a.k_range.empty();
    if (a.method == "dbmca") {
        dbmca::SelectOptions opts;
        opts.restarts = a.restarts;
        opts.workers = a.common.workers;
        opts.fit.max_iter = a.max_iter;
        opts.fit.seeding = dbmca::parse_seeding(a.seeding);
        if (!range) {
            auto m = dbmca::fit_best_of(*sim, ks.front(), seed, opts);
            if (ks.front() >= 2) m.silhouette = dbmca::silhouette(*sim, m.partition).mean;
            return from_model(m);
        }
        const auto sel = dbmca::select_k(*sim, ks, seed, opts);
        auto outcome = from_model(sel.best());
        for (std::size_t i = 0; i < sel.ks.size(); ++i) {
            outcome.curve.emplace_back(sel.ks[i], sel.models[i].silhouette, sel.models[i].objective());
        }
        return outcome;
    }
    const std::span<const P> view(points);
    if (!range) {
        const auto r = skmeans::best_of(view, ks.front(), seed, a.restarts, a.max_iter);
        const double s = ks.front() >= 2 ? dbmca::silhouette(*sim, r.partition).mean
                                         : std::numeric_limits<double>::quiet_NaN();
        return from_result(r, s);
    }
    const auto sel = skmeans::select_k(view, *sim, ks, seed, a.restarts);
    std::size_t best = 0;
    while (sel.ks[best] != sel.best_k) ++best;
    auto outcome = from_result(sel.results[best], sel.silhouettes[best]);
    for (std::size_t i = 0; i < sel.ks.size(); ++i) {
        outcome.curve.emplace_back(sel.ks[i], sel.silhouettes[i], sel.results[i].objective());
    }
    return outcome;
}

int cmd_cluster(const CLI::App* sub, const ClusterArgs& a, std::ostream& stdout_) {
    if (a.method != "dbmca" && a.method != "skmeans") throw UsageError("--method must be dbmca or skmeans");
    const auto kind = depth_arg(a.depth);
    try {
        dbmca::parse_seeding(a.seeding);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if ((a.k == 0) == a.k_range.empty()) throw UsageError("give exactly one of --k and --k-range");
    if (a.restarts < 1) throw UsageError("--restarts must be >= 1");
    const auto ks = a.k_range.empty() ? std::vector<std::size_t>{a.k} : parse_k_range(a.k_range);
    const auto seed = resolve_seed(a.common);

    const auto points = read_points(a.input);
    if (ks.back() > points.size()) {
        throw std::runtime_error("k=" + std::to_string(ks.back()) + " exceeds the number of points (" +
                                 std::to_string(points.size()) + ")");
    }
    const auto outcome = points.is_sparse ? cluster_points(points.sparse, a, kind, ks, seed)
                                          : cluster_points(points.dense, a, kind, ks, seed);

    std::optional<Partition> truth;
    if (!a.truth.empty()) {
        truth = ingest::read_labels(a.truth, points.size()).partition;
    }

    Output out("", stdout_);
    write_header(*out, sub, seed);
    *out << "method,depth_kind,k,objective,mean_silhouette,iterations,converged";
    if (truth) *out << ",ari,ri";
    *out << '\n';
    *out << a.method << ',' << to_string(kind) << ',' << outcome.partition.num_clusters() << ','
         << format_real(outcome.trace.back()) << ',' << format_real(outcome.silhouette) << ',' << outcome.iterations
         << ',' << (outcome.converged ? "true" : "false");
    if (truth) {
        *out << ',' << format_real(validation::adjusted_rand_index(outcome.partition, *truth)) << ','
             << format_real(validation::rand_index(outcome.partition, *truth));
    }
    *out << '\n';
    if (!outcome.curve.empty()) {
        *out << "\nk,mean_silhouette,objective\n";
        for (const auto& [k, s, j] : outcome.curve) *out << k << ',' << format_real(s) << ',' << format_real(j) << '\n';
    }

    if (!a.out_prefix.empty()) {
        Output labels(a.out_prefix + ".labels.csv", stdout_);
        write_header(*labels, sub, seed);
        for (int l : outcome.partition.labels()) *labels << l << '\n';
        Output trace(a.out_prefix + ".trace.csv", stdout_);
        write_header(*trace, sub, seed);
        *trace << "iteration,objective\n";
        for (std::size_t i = 0; i < outcome.trace.size(); ++i) *trace << i << ',' << format_real(outcome.trace[i]) << '\n';
        if (!outcome.medoids.empty()) {
            Output medoids(a.out_prefix + ".medoids.csv", stdout_);
            write_header(*medoids, sub, seed);
            for (auto m : outcome.medoids) *medoids << m << '\n';
        }
    }
    return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
    std::string a;
    std::string b;
    std::size_t n_perm = 1000;
    std::string out;
    Common common;
};

struct LoadedPartition {
    std::optional<Partition> crisp;
    std::optional<validation::FuzzyPartition> fuzzy;

    validation::FuzzyPartition as_fuzzy() const {
        return fuzzy ? *fuzzy : validation::FuzzyPartition::from_crisp(*crisp);
    }
    std::size_t size() const { return crisp ? crisp->size() : fuzzy->size(); }
};

LoadedPartition load_partition(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": no labels");
    LoadedPartition p;
    const bool fuzzy = std::any_of(lines.begin(), lines.end(), [](const auto& l) { return l.find(',') != l.npos; });
    if (!fuzzy) {
        std::vector<int> ids;
        std::vector<std::string> names;
        for (const auto& l : lines) {
            auto it = std::find(names.begin(), names.end(), l);
            if (it == names.end()) it = names.insert(names.end(), l);
            ids.push_back(static_cast<int>(it - names.begin()));
        }
        p.crisp = Partition(std::move(ids));
        return p;
    }
    const auto rows = read_real_rows(path);
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    p.fuzzy.emplace(rows.size(), rows.front().size(), std::move(flat));
    return p;
}

int cmd_validate(const CLI::App* sub, const ValidateArgs& a, std::ostream& stdout_) {
    if (a.n_perm < 1) throw UsageError("--n-perm must be >= 1");
    const auto seed = resolve_seed(a.common);
    const auto pa = load_partition(a.a);
    const auto pb = load_partition(a.b);
    if (pa.size() != pb.size()) {
        throw std::runtime_error("partitions differ in length (" + std::to_string(pa.size()) + " vs " +
                                 std::to_string(pb.size()) + ")");
    }
    Output out(a.out, stdout_);
    write_header(*out, sub, seed);
    *out << "index,value\n";
    if (pa.crisp && pb.crisp) {
        *out << "RI," << format_real(validation::rand_index(*pa.crisp, *pb.crisp)) << '\n';
        *out << "ARI," << format_real(validation::adjusted_rand_index(*pa.crisp, *pb.crisp)) << '\n';
    } else {
        const auto g = pa.as_fuzzy();
        const auto h = pb.as_fuzzy();
        const auto r = validation::aci_detailed(g, h, a.n_perm, seed, a.common.workers);
        *out << "NDC," << format_real(r.ndc) << '\n';
        *out << "ACI," << format_real(r.aci) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string filter;
    std::string kinds = "add,cdd,chdd";
    std::string out;
    std::string per_k_out;
    std::size_t restarts = 10;
    std::size_t k_max = 10;
    bool timing = false;
    Common common;
};

int cmd_simulate(const CLI::App* sub, const SimulateArgs& a, std::ostream& stdout_) {
    sim::StudyOptions opts;
    std::vector<sim::SimCell> design;
    try {
        design = sim::filter_design(sim::full_design(), sim::parse_filter(a.filter));
        opts.kinds.clear();
        std::size_t pos = 0;
        while (pos <= a.kinds.size()) {
            const auto comma = std::min(a.kinds.find(',', pos), a.kinds.size());
            const auto tok = a.kinds.substr(pos, comma - pos);
            if (!tok.empty()) opts.kinds.push_back(parse_depth_kind(tok));
            pos = comma + 1;
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (design.empty()) throw UsageError("--filter selects no design cells");
    if (opts.kinds.empty()) throw UsageError("--kinds is empty");
    if (a.restarts < 1) throw UsageError("--restarts must be >= 1");
    if (a.k_max < 2) throw UsageError("--k-max must be >= 2");
    opts.master_seed = resolve_seed(a.common);
    opts.workers = a.common.workers;
    opts.restarts = a.restarts;
    opts.k_max = a.k_max;
    opts.record_runtime = a.timing;

    Output out(a.out, stdout_);
    write_header(*out, sub, opts.master_seed);
    std::optional<Output> per_k;
    if (!a.per_k_out.empty()) {
        per_k.emplace(a.per_k_out, stdout_);
        write_header(**per_k, sub, opts.master_seed);
    }
    const auto results = sim::run_study(design, opts, &*out, per_k ? &**per_k : nullptr);
    const bool all_failed =
        std::all_of(results.begin(), results.end(), [](const auto& r) { return !r.error.empty(); });
    return all_failed ? kRuntimeFailure : kOk;
}

// ----------------------------------------------------------- ingest-report

struct IngestArgs {
    std::string matrix;
    std::string labels;
    std::string out;
};

int cmd_ingest_report(const CLI::App* sub, const IngestArgs& a, std::ostream& stdout_) {
    const auto m = ingest::read_cluto_matrix(a.matrix);
    std::optional<ingest::LabelFile> labels;
    if (!a.labels.empty()) labels = ingest::read_labels(a.labels, m.n_rows);
    Output out(a.out, stdout_);
    write_header(*out, sub, 0);
    *out << "n_rows,n_cols,nnz,zero_fraction\n"
         << m.n_rows << ',' << m.n_cols << ',' << m.nnz << ',' << format_real(ingest::zero_fraction(m)) << '\n';
    if (labels) {
        *out << '\n';
        ingest::write_class_report(*labels, *out);
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Depth-based clustering of directional data", "spheredepth"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "Draw synthetic points");
    generate->require_subcommand(1);

    GenerateVmfArgs gv;
    auto* gen_vmf = generate->add_subcommand("vmf", "Sample from one von Mises-Fisher distribution");
    gen_vmf->add_option("--d", gv.d, "Dimension (points lie on S^{d-1})")->required()->check(CLI::Range(2, 1 << 20));
    gen_vmf->add_option("--kappa", gv.kappa, "Concentration")->required()->check(CLI::NonNegativeNumber);
    gen_vmf->add_option("--n", gv.n, "Number of points")->required()->check(CLI::PositiveNumber);
    gen_vmf->add_option("--mu", gv.mu, "Mean direction, comma separated (default e1)")->delimiter(',');
    gen_vmf->add_option("--out,-o", gv.out, "Points CSV (default stdout)");
    gen_vmf->add_option("--labels", gv.labels, "Also write a labels file");
    add_common(gen_vmf, gv.common);

    GenerateCellArgs gc;
    auto* gen_cell = generate->add_subcommand("cell", "Generate one simulation-design dataset");
    gen_cell->add_option("--clusters", gc.clusters, "Number of clusters")->check(CLI::Range(1, 1000))->capture_default_str();
    gen_cell->add_option("--dim", gc.dim, "Dimension")->check(CLI::Range(2, 1 << 20))->capture_default_str();
    gen_cell->add_option("--noise", gc.noise, "low, medium or high")->capture_default_str();
    gen_cell->add_flag("--structured", gc.structured, "Constrained center placement (2..5 clusters)");
    gen_cell->add_option("--replicate", gc.replicate, "Replicate index")->check(CLI::NonNegativeNumber)->capture_default_str();
    gen_cell->add_option("--n", gc.n, "Sample size")->check(CLI::PositiveNumber)->capture_default_str();
    gen_cell->add_option("--out,-o", gc.out, "Points CSV (default stdout)");
    gen_cell->add_option("--labels", gc.labels, "Also write the true labels");
    add_common(gen_cell, gc.common);

    DepthArgs da;
    auto* depth = app.add_subcommand("depth", "Sample depth of every point (or of query points)");
    depth->add_option("--input,-i", da.input, "Points (dense CSV or CLUTO)")->required();
    depth->add_option("--depth", da.depth, "arc, cosine or chord")->capture_default_str();
    depth->add_option("--query", da.query, "Query points CSV (default: the sample itself)");
    depth->add_option("--alpha", da.alpha, "Also report membership of the depth region at this level");
    depth->add_option("--out,-o", da.out, "Output CSV (default stdout)");
    add_common(depth, da.common);

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster", "Cluster points with DBMCA or spherical k-means");
    ClusterArgs sa;
    sa.k_range = "2:10";
    auto* select = app.add_subcommand("select-k", "Choose k by mean silhouette");
    for (auto [sub, args] : {std::pair{cluster, &ca}, std::pair{select, &sa}}) {
        sub->add_option("--input,-i", args->input, "Points (dense CSV or CLUTO)")->required();
        sub->add_option("--method", args->method, "dbmca or skmeans")->capture_default_str();
        sub->add_option("--depth", args->depth, "arc, cosine or chord")->capture_default_str();
        sub->add_option("--restarts", args->restarts, "Seeded restarts per k")->capture_default_str();
        sub->add_option("--max-iter", args->max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--seeding", args->seeding, "depth or spread (dbmca)")->capture_default_str();
        sub->add_option("--truth", args->truth, "Reference labels; adds ARI and RI");
        sub->add_option("--out-prefix", args->out_prefix, "Write <prefix>.labels.csv, .trace.csv, .medoids.csv");
        add_common(sub, args->common);
    }
    auto* k_opt = cluster->add_option("--k", ca.k, "Number of clusters")->check(CLI::PositiveNumber);
    cluster->add_option("--k-range", ca.k_range, "Search lo:hi by silhouette")->excludes(k_opt);
    select->add_option("--k-range", sa.k_range, "Search lo:hi")->capture_default_str();

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Compare two partitions (crisp labels or membership CSVs)");
    validate->add_option("--a", va.a, "First partition")->required();
    validate->add_option("--b", va.b, "Second partition")->required();
    validate->add_option("--n-perm", va.n_perm, "Permutations for ACI")->capture_default_str();
    validate->add_option("--out,-o", va.out, "Output CSV (default stdout)");
    add_common(validate, va.common);

    SimulateArgs sm;
    auto* simulate = app.add_subcommand("simulate", "Run the factorial simulation study");
    simulate->add_option("--filter", sm.filter, "e.g. clusters=2,dim=3,noise=low,structured=true");
    simulate->add_option("--kinds", sm.kinds, "Depth kinds, comma separated")->capture_default_str();
    simulate->add_option("--out,-o", sm.out, "Results CSV (default stdout)");
    simulate->add_option("--per-k-out", sm.per_k_out, "Per-k silhouette/ARI CSV");
    simulate->add_option("--restarts", sm.restarts, "Restarts per k")->capture_default_str();
    simulate->add_option("--k-max", sm.k_max, "Largest k searched")->capture_default_str();
    simulate->add_flag("--timing", sm.timing, "Record wall-clock runtime_ms (output no longer reproducible)");
    add_common(simulate, sm.common);

    IngestArgs ia;
    auto* ingest_cmd = app.add_subcommand("ingest-report", "Summarize a CLUTO matrix and its class labels");
    ingest_cmd->add_option("--matrix", ia.matrix, "CLUTO .mat file")->required();
    ingest_cmd->add_option("--labels", ia.labels, "One class per line");
    ingest_cmd->add_option("--out,-o", ia.out, "Output CSV (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (gen_vmf->parsed()) return cmd_generate_vmf(gen_vmf, gv, out);
        if (gen_cell->parsed()) return cmd_generate_cell(gen_cell, gc, out);
        if (depth->parsed()) return cmd_depth(depth, da, out);
        if (cluster->parsed()) return cmd_cluster(cluster, ca, out);
        if (select->parsed()) return cmd_cluster(select, sa, out);
        if (validate->parsed()) return cmd_validate(validate, va, out);
        if (simulate->parsed()) return cmd_simulate(simulate, sm, out);
        if (ingest_cmd->parsed()) return cmd_ingest_report(ingest_cmd, ia, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kUsageError;
}

}  // namespace spheredepth::cli
