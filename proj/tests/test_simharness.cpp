#include "support.hpp"

#include "spheredepth/simharness.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace spheredepth;
using namespace spheredepth::sim;

TEST(Design, FullFactorialHas720DistinctCells) {
    const auto design = full_design();
    ASSERT_EQ(design.size(), 720u);
    std::set<std::string> ids;
    for (const auto& c : design) ids.insert(c.id());
    EXPECT_EQ(ids.size(), 720u);
    EXPECT_EQ(design.front().id(), "k2-d3-low-s-r0");
    EXPECT_EQ(design.back().id(), "k5-d10-high-u-r9");
    for (const auto& c : design) EXPECT_EQ(c.sample_size, 500u);
}

TEST(Design, Filter) {
    const auto design = full_design();
    EXPECT_EQ(filter_design(design, parse_filter("")).size(), 720u);
    EXPECT_EQ(filter_design(design, parse_filter("clusters=2")).size(), 180u);
    EXPECT_EQ(filter_design(design, parse_filter("d=10,noise=HIGH")).size(), 80u);
    const auto one = filter_design(design, parse_filter("k=3,dim=5,noise=medium,structured=false,replicate=4"));
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].id(), "k3-d5-medium-u-r4");
    EXPECT_THROW(parse_filter("colour=red"), std::invalid_argument);
    EXPECT_THROW(parse_filter("noise=loud"), std::invalid_argument);
    EXPECT_THROW(parse_filter("dim"), std::invalid_argument);
}

TEST(Kappa, DrawsStayInTheirRange) {
    Rng rng(1);
    for (Noise noise : kAllNoise) {
        const auto range = kappa_range(noise);
        for (int i = 0; i < 1000; ++i) {
            const double k = draw_kappa(noise, rng);
            EXPECT_GE(k, range.lo);
            EXPECT_LE(k, range.hi);
        }
        EXPECT_EQ(parse_noise(to_string(noise)), noise);
    }
    EXPECT_EQ(kappa_range(Noise::Low).lo, 10.0);
    EXPECT_EQ(kappa_range(Noise::Medium).hi, 8.0);
    EXPECT_EQ(kappa_range(Noise::High).lo, 2.0);
    EXPECT_EQ(draw_kappa(Noise::High, 9), draw_kappa(Noise::High, 9));
}

TEST(Centers, StructuredConstraintsHold) {
    for (std::size_t k = 2; k <= 5; ++k) {
        EXPECT_EQ(structured_constraints(k).size(), k - 1);
        for (std::size_t dim : {3u, 5u, 10u}) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const auto centers = place_structured_centers(k, dim, seed);
                ASSERT_EQ(centers.size(), k);
                EXPECT_TRUE(verify_structured_centers(centers));
                for (const auto& con : structured_constraints(k)) {
                    for (std::size_t other : con.against) {
                        const double dist = cosine_distance(centers[con.center], centers[other]);
                        EXPECT_GE(dist, con.lo);
                        EXPECT_LE(dist, con.hi);
                    }
                }
                EXPECT_EQ(centers, place_structured_centers(k, dim, seed));
            }
        }
    }
    EXPECT_THROW(place_structured_centers(6, 3, 0), std::invalid_argument);
    EXPECT_THROW(place_structured_centers(1, 3, 0), std::invalid_argument);
}

TEST(Centers, VerifyRejectsViolations) {
    using testsupport::basis;
    EXPECT_TRUE(verify_structured_centers({basis(3, 0), basis(3, 0, -1.0)}));
    EXPECT_FALSE(verify_structured_centers({basis(3, 0), basis(3, 1)}));
    EXPECT_FALSE(verify_structured_centers({basis(3, 0), basis(3, 0, -1.0), basis(3, 0)}));
    EXPECT_TRUE(verify_structured_centers({basis(3, 0), basis(3, 0, -1.0), basis(3, 1)}));
}

TEST(Centers, UnstructuredCentersAreUnconstrained) {
    bool close_pair = false;
    for (std::uint64_t seed = 0; seed < 200 && !close_pair; ++seed) {
        const auto c = place_unstructured_centers(5, 3, seed);
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) close_pair |= cosine_distance(c[i], c[j]) < 0.5;
        }
    }
    EXPECT_TRUE(close_pair);
}

TEST(Dataset, ShapeProportionsAndDeterminism) {
    for (const auto& cell : filter_design(full_design(), parse_filter("replicate=0"))) {
        const auto ds = generate_dataset(cell, 77);
        ASSERT_EQ(ds.points.size(), 500u);
        EXPECT_EQ(ds.true_labels.num_clusters(), static_cast<std::size_t>(cell.n_clusters));
        EXPECT_EQ(ds.points[0].dim(), cell.dim);
        const auto range = kappa_range(cell.noise);
        double total = 0.0;
        for (std::size_t c = 0; c < ds.proportions.size(); ++c) {
            total += ds.proportions[c];
            EXPECT_GE(ds.proportions[c], 0.5 / cell.n_clusters);
            EXPECT_GE(ds.kappas[c], range.lo);
            EXPECT_LE(ds.kappas[c], range.hi);
            EXPECT_LE(std::abs(static_cast<double>(ds.true_labels.cluster_sizes()[c]) - 500 * ds.proportions[c]), 1.0);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        if (cell.structured) EXPECT_TRUE(verify_structured_centers(ds.centers));
    }
    SimCell cell{3, 5, Noise::Medium, false, 2};
    const auto a = generate_dataset(cell, 5);
    const auto b = generate_dataset(cell, 5);
    EXPECT_EQ(a.points, b.points);
    EXPECT_EQ(a.true_labels, b.true_labels);
    EXPECT_NE(generate_dataset(cell, 6).points, a.points);
    cell.replicate = 3;
    EXPECT_NE(dataset_seed(cell, 5), dataset_seed(SimCell{3, 5, Noise::Medium, false, 2}, 5));
}

TEST(Dataset, LowNoiseClustersConcentrateAroundCenters) {
    const SimCell cell{2, 3, Noise::Low, true, 0};
    const auto ds = generate_dataset(cell, 1);
    const auto members = ds.true_labels.members();
    for (std::size_t c = 0; c < 2; ++c) {
        std::vector<UnitVector> pts;
        for (std::size_t i : members[c]) pts.push_back(ds.points[i]);
        const auto mean = normalize(mean_vector(pts));
        EXPECT_GT(dot(mean, ds.centers[c]), 0.98);
    }
}

namespace {

StudyOptions quick_options() {
    StudyOptions o;
    o.kinds = {DepthKind::Cosine, DepthKind::Chord};
    o.master_seed = 2024;
    o.k_max = 4;
    o.restarts = 2;
    return o;
}

}  // namespace

TEST(Study, RowsAreOrderedAndReproducible) {
    const auto design = filter_design(full_design(), parse_filter("clusters=2,dim=3,noise=low,structured=true"));
    ASSERT_EQ(design.size(), 10u);
    const auto sub = std::vector<SimCell>(design.begin(), design.begin() + 3);

    auto opts = quick_options();
    std::ostringstream a, ak, b, bk;
    const auto rows = run_study(sub, opts, &a, &ak);
    opts.workers = 3;
    run_study(sub, opts, &b, &bk);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(ak.str(), bk.str());

    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].cell, sub[i / 2]);
        EXPECT_TRUE(rows[i].error.empty()) << rows[i].error;
        EXPECT_EQ(rows[i].per_k.size(), 3u);
        EXPECT_EQ(rows[i].runtime_ms, 0);
        EXPECT_GE(rows[i].selected_k, 2u);
        EXPECT_LE(rows[i].selected_k, 4u);
    }
    EXPECT_EQ(rows[0].kind, DepthKind::Cosine);
    EXPECT_EQ(rows[1].kind, DepthKind::Chord);
    std::istringstream lines(a.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        ++n;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12);
    }
    EXPECT_EQ(n, 7u);
}

TEST(Study, FailuresBecomeErrorRows) {
    SimCell bad{6, 3, Noise::Low, true, 0};
    std::ostringstream out;
    const auto rows = run_study({bad}, quick_options(), &out);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) EXPECT_FALSE(r.error.empty());
    EXPECT_NE(out.str().find("NA"), std::string::npos);
    EXPECT_THROW(run_study({}, quick_options()), std::invalid_argument);
}

TEST(Study, HeadersMatchRowWidth) {
    std::ostringstream h, k;
    write_results_header(h);
    write_per_k_header(k);
    EXPECT_EQ(h.str(),
              "cell_id,n_clusters,dim,noise,structured,replicate,depth_kind,selected_k,ari_selected,ari_true_k,"
              "mean_silhouette,runtime_ms,error\n");
    EXPECT_EQ(k.str(), "cell_id,depth_kind,k,mean_silhouette,ari\n");
}
