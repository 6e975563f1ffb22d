#include "support.hpp"

#include "spheredepth/dbmca.hpp"
#include "spheredepth/skmeans.hpp"
#include "spheredepth/validation.hpp"

#include <gtest/gtest.h>

using namespace spheredepth;
using testsupport::basis;

TEST(SphericalKMeans, SingleClusterCentroidIsNormalizedMean) {
    const auto pts = vmf::sample(vmf::VmfParams(basis(3, 0), 2.0), 200, 1);
    const auto r = skmeans::spherical_kmeans(pts, 1, 2);
    const auto mean = normalize(mean_vector(pts));
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r.centroids[0][j], mean[j], 1e-12);
    EXPECT_TRUE(r.converged);
}

TEST(SphericalKMeans, AntipodalPointMassesSeparatePerfectly) {
    std::vector<UnitVector> pts;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
        pts.push_back(basis(4, 1));
        labels.push_back(0);
        pts.push_back(-basis(4, 1));
        labels.push_back(1);
    }
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto r = skmeans::spherical_kmeans(pts, 2, s);
        EXPECT_DOUBLE_EQ(validation::adjusted_rand_index(r.partition, Partition(labels)), 1.0);
    }
}

TEST(SphericalKMeans, ObjectiveNonDecreasingAndDeterministic) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto pts = testsupport::vmf_mixture(3 + s % 6, 4, 30, 2.0, 100 + s).points;
        const auto r = skmeans::spherical_kmeans(pts, 2 + s % 5, s);
        for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
            EXPECT_GE(r.objective_trace[i], r.objective_trace[i - 1] - 1e-12);
        }
        EXPECT_EQ(r.partition, skmeans::spherical_kmeans(pts, 2 + s % 5, s).partition);
        EXPECT_EQ(r.partition.num_clusters(), 2 + s % 5);
        for (const auto& c : r.centroids) {
            double sq = 0.0;
            for (double v : c) sq += v * v;
            EXPECT_NEAR(sq, 1.0, 1e-12);
        }
    }
}

TEST(SphericalKMeans, EveryPointCanBeItsOwnCluster) {
    const auto pts = testsupport::uniform_points(3, 6, 3);
    const auto r = skmeans::spherical_kmeans(pts, 6, 4);
    EXPECT_EQ(r.partition.num_clusters(), 6u);
    EXPECT_THROW(skmeans::spherical_kmeans(pts, 7, 4), std::invalid_argument);
    EXPECT_THROW(skmeans::spherical_kmeans(pts, 0, 4), std::invalid_argument);
}

TEST(SphericalKMeans, SparseMatchesDense) {
    std::vector<SparseUnitVector> sparse;
    std::vector<UnitVector> dense;
    Rng rng(5);
    for (int i = 0; i < 40; ++i) {
        std::vector<SparseUnitVector::Entry> e;
        const std::uint32_t base = i < 20 ? 0 : 10;
        for (std::uint32_t j = 0; j < 10; ++j) {
            if (uniform01(rng) < 0.4) e.push_back({base + j, 1.0 + uniform01(rng)});
        }
        if (e.empty()) e.push_back({base, 1.0});
        sparse.push_back(normalize_sparse(20, e));
        dense.push_back(sparse.back().to_dense());
    }
    const auto a = skmeans::spherical_kmeans(sparse, 2, 6);
    const auto b = skmeans::spherical_kmeans(dense, 2, 6);
    EXPECT_EQ(a.partition, b.partition);
    std::vector<int> truth(40, 0);
    std::fill(truth.begin() + 20, truth.end(), 1);
    EXPECT_DOUBLE_EQ(validation::adjusted_rand_index(a.partition, Partition(truth)), 1.0);
}

TEST(SphericalKMeans, SelectKUsesDepthSilhouette) {
    const auto clouds = testsupport::antipodal_clouds(3, 40, 40.0, 7);
    const auto sim = depth_matrix(clouds.points, DepthKind::Cosine);
    const std::vector<std::size_t> ks{2, 3, 4};
    const auto sel = skmeans::select_k(std::span<const UnitVector>(clouds.points), sim, ks, 8);
    EXPECT_EQ(sel.best_k, 2u);
    ASSERT_EQ(sel.silhouettes.size(), 3u);
    EXPECT_NEAR(sel.silhouettes[0], dbmca::silhouette(sim, sel.results[0].partition).mean, 1e-15);
}
