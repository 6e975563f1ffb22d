#include "support.hpp"

#include "spheredepth/dbmca.hpp"
#include "spheredepth/validation.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <set>

using namespace spheredepth;
using testsupport::basis;

namespace {

// Global maximum of J over all medoid pairs: each point takes the better of
// the two medoids.
double exhaustive_two_medoid_optimum(const SimilaritySource& sim) {
    double best = -1.0;
    for (std::size_t a = 0; a < sim.size(); ++a) {
        for (std::size_t b = a + 1; b < sim.size(); ++b) {
            long double total = 0.0L;
            for (std::size_t i = 0; i < sim.size(); ++i) total += std::max(sim.at(i, a), sim.at(i, b));
            best = std::max(best, static_cast<double>(total));
        }
    }
    return best;
}

long double within_cluster_sum(const SimilaritySource& sim, const Partition& p, const std::vector<std::size_t>& m) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) total += sim.at(i, m[static_cast<std::size_t>(p.label(i))]);
    return total;
}

}  // namespace

TEST(Partition, ValidatesAndRelabels) {
    EXPECT_THROW(Partition(std::vector<int>{0, 2}), std::invalid_argument);
    EXPECT_THROW(Partition(std::vector<int>{-1, 0}), std::invalid_argument);
    EXPECT_THROW(Partition(std::vector<int>{}), std::invalid_argument);
    const auto p = Partition::from_any_labels(std::vector<int>{7, 7, 3, 9, 3});
    EXPECT_EQ(std::vector<int>(p.labels().begin(), p.labels().end()), (std::vector<int>{0, 0, 1, 2, 1}));
    EXPECT_EQ(p.num_clusters(), 3u);
    EXPECT_EQ(p.members()[1], (std::vector<std::size_t>{2, 4}));
    EXPECT_EQ(p.cluster_sizes()[0], 2u);
}

TEST(InitMedoids, TrivialSizes) {
    const auto pts = testsupport::uniform_points(3, 12, 1);
    const auto sim = depth_matrix(pts, DepthKind::Cosine);
    std::set<std::size_t> firsts;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto one = dbmca::init_medoids(sim, 1, s);
        ASSERT_EQ(one.size(), 1u);
        firsts.insert(one[0]);
    }
    EXPECT_GT(firsts.size(), 6u);
    auto all = dbmca::init_medoids(sim, 12, 3);
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(12);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    EXPECT_EQ(all, expected);
    EXPECT_THROW(dbmca::init_medoids(sim, 0, 1), std::invalid_argument);
    EXPECT_THROW(dbmca::init_medoids(sim, 13, 1), std::invalid_argument);
}

TEST(InitMedoids, DistinctAndDeterministic) {
    const auto pts = testsupport::vmf_mixture(4, 3, 30, 5.0, 2).points;
    for (DepthKind kind : kAllDepthKinds) {
        const auto sim = depth_matrix(pts, kind);
        for (auto seeding : {dbmca::Seeding::Depth, dbmca::Seeding::Spread}) {
            for (std::uint64_t s = 0; s < 20; ++s) {
                const auto m = dbmca::init_medoids(sim, 6, s, seeding);
                EXPECT_EQ(m, dbmca::init_medoids(sim, 6, s, seeding));
                EXPECT_EQ(std::set<std::size_t>(m.begin(), m.end()).size(), 6u);
            }
        }
    }
}

TEST(InitMedoids, DepthWeightingConcentratesSpreadSeparates) {
    // Similarity-proportional draws favour the first medoid's own cloud;
    // uniform seeding picks the same cloud with probability 49/99.
    const auto clouds = testsupport::antipodal_clouds(3, 50, 50.0, 3);
    const auto sim = depth_matrix(clouds.points, DepthKind::Cosine);
    int same_depth = 0;
    int same_spread = 0;
    int same_uniform = 0;
    Rng rng(4);
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto d = dbmca::init_medoids(sim, 2, s, dbmca::Seeding::Depth);
        const auto p = dbmca::init_medoids(sim, 2, s, dbmca::Seeding::Spread);
        same_depth += clouds.labels[d[0]] == clouds.labels[d[1]];
        same_spread += clouds.labels[p[0]] == clouds.labels[p[1]];
        std::vector<std::size_t> idx(100);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::shuffle(idx.begin(), idx.end(), rng);
        same_uniform += clouds.labels[idx[0]] == clouds.labels[idx[1]];
    }
    EXPECT_GT(same_depth, same_uniform);
    EXPECT_LT(same_spread * 4, same_uniform);
}

TEST(InitMedoids, LaterDrawsWeightedWithinNeighbourhoods) {
    // Hand-made similarities: two tight groups {0,1} and {2,3,4}. With
    // medoids 0 and 2 chosen, the third draw is limited to 1, 3, 4 with
    // weights sim(i, m_p(i)) / sum over the neighbourhood.
    const std::vector<double> s{
        2.0, 1.8, 0.1, 0.2, 0.1,  //
        1.8, 2.0, 0.1, 0.1, 0.2,  //
        0.1, 0.1, 2.0, 1.5, 1.0,  //
        0.2, 0.1, 1.5, 2.0, 1.2,  //
        0.1, 0.2, 1.0, 1.2, 2.0,
    };
    const DepthMatrix sim(5, DepthKind::Cosine, s);
    const double w1 = 1.8 / (2.0 + 1.8);
    const double w3 = 1.5 / (2.0 + 1.5 + 1.0);
    const double w4 = 1.0 / (2.0 + 1.5 + 1.0);
    std::vector<int> hits(5, 0);
    int runs = 0;
    for (std::uint64_t seed = 0; seed < 40000; ++seed) {
        const auto m = dbmca::init_medoids(sim, 3, seed);
        if (!(m[0] == 0 && m[1] == 2)) continue;
        ++runs;
        ++hits[m[2]];
    }
    ASSERT_GT(runs, 300);
    const double total = w1 + w3 + w4;
    EXPECT_EQ(hits[0] + hits[2], 0);
    EXPECT_NEAR(hits[1] / double(runs), w1 / total, 0.08);
    EXPECT_NEAR(hits[3] / double(runs), w3 / total, 0.08);
    EXPECT_NEAR(hits[4] / double(runs), w4 / total, 0.08);
}

TEST(Assign, Rules) {
    const std::vector<UnitVector> pts{basis(3, 0), -basis(3, 0), normalize(std::vector<double>{0.2, 1.0, 0.0}),
                                      normalize(std::vector<double>{-0.3, 0.0, 1.0}), basis(3, 1)};
    const auto sim = depth_matrix(pts, DepthKind::Cosine);
    const std::vector<std::size_t> one{3};
    const auto single = dbmca::assign(sim, one);
    EXPECT_TRUE(std::all_of(single.labels().begin(), single.labels().end(), [](int l) { return l == 0; }));
    const std::vector<std::size_t> two{0, 1};
    const auto split = dbmca::assign(sim, two);
    EXPECT_EQ(split.label(2), 0);
    EXPECT_EQ(split.label(3), 1);
    EXPECT_EQ(split.label(4), 0);  // equidistant: lowest cluster
    const std::vector<std::size_t> swapped{1, 0};
    EXPECT_EQ(dbmca::assign(sim, swapped).label(4), 0);
    EXPECT_THROW(dbmca::assign(sim, std::vector<std::size_t>{}), std::invalid_argument);
    EXPECT_THROW(dbmca::assign(sim, std::vector<std::size_t>{1, 1}), std::invalid_argument);
    EXPECT_THROW(dbmca::assign(sim, std::vector<std::size_t>{9}), std::invalid_argument);
}

TEST(Assign, DuplicateMedoidPointsKeepEveryClusterNonEmpty) {
    const std::vector<UnitVector> pts{basis(3, 0), basis(3, 0), basis(3, 0), basis(3, 1)};
    const auto sim = depth_matrix(pts, DepthKind::Arc);
    const std::vector<std::size_t> medoids{0, 1, 2};
    const auto p = dbmca::assign(sim, medoids);
    EXPECT_EQ(p.num_clusters(), 3u);
    EXPECT_EQ(p.label(1), 1);
    EXPECT_EQ(p.label(2), 2);
}

TEST(Refine, Examples) {
    const std::vector<UnitVector> pts{-basis(3, 0), basis(3, 0), basis(3, 0), basis(3, 2)};
    const auto sim = depth_matrix(pts, DepthKind::Cosine);
    const Partition p(std::vector<int>{0, 0, 0, 1});
    const auto m = dbmca::refine(sim, p);
    EXPECT_EQ(m[0], 1u);
    EXPECT_EQ(m[1], 3u);
    // The incumbent is kept when it ties.
    const std::vector<std::size_t> incumbent{2, 3};
    EXPECT_EQ(dbmca::refine(sim, p, incumbent)[0], 2u);
}

TEST(Refine, MatchesBruteForceAndNeverLowersHomogeneity) {
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        const auto pts = testsupport::uniform_points(4, 40, 100 + t);
        const DepthKind kind = kAllDepthKinds[t % 3];
        const auto sim = depth_matrix(pts, kind);
        const auto p = testsupport::random_partition(pts.size(), 4, rng);
        const auto m = dbmca::refine(sim, p);
        const auto members = p.members();
        std::vector<std::size_t> any_medoids;
        for (std::size_t k = 0; k < members.size(); ++k) {
            std::size_t best = members[k].front();
            double best_sum = -1.0;
            for (std::size_t c : members[k]) {
                double s = 0.0;
                for (std::size_t j : members[k]) s += sim.at(c, j);
                if (s > best_sum + 1e-12) {
                    best_sum = s;
                    best = c;
                }
            }
            EXPECT_EQ(m[k], best);
            any_medoids.push_back(members[k][members[k].size() / 2]);
        }
        EXPECT_GE(within_cluster_sum(sim, p, m), within_cluster_sum(sim, p, any_medoids));
    }
}

TEST(Fit, SeparatedCloudsRecoveredExactly) {
    const auto clouds = testsupport::antipodal_clouds(3, 100, 50.0, 6);
    const Partition truth(clouds.labels);
    for (DepthKind kind : kAllDepthKinds) {
        const auto sim = depth_matrix(clouds.points, kind);
        const auto model = dbmca::fit_best_of(sim, 2, 7);
        EXPECT_DOUBLE_EQ(validation::adjusted_rand_index(model.partition, truth), 1.0);
        EXPECT_EQ(model.kind, kind);
        EXPECT_GT(model.silhouette, 0.5);
    }
}

TEST(Fit, SingleClusterTakesTheDeepestPoint) {
    const auto pts = vmf::sample(vmf::VmfParams(basis(4, 3), 3.0), 80, 8);
    for (DepthKind kind : kAllDepthKinds) {
        const auto sim = depth_matrix(pts, kind);
        const auto model = dbmca::fit(sim, 1, 9);
        ASSERT_EQ(model.medoid_indices.size(), 1u);
        EXPECT_EQ(model.medoid_indices[0], deepest_point_index(pts, kind));
        double expected = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) expected += sim.at(i, model.medoid_indices[0]);
        EXPECT_NEAR(model.objective(), expected, 1e-9);
        EXPECT_TRUE(std::isnan(model.silhouette));
    }
}

TEST(Fit, TinyInstancesReachTheGlobalOptimumMostly) {
    int hits = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto pts = testsupport::uniform_points(3, 5, 1000 + s);
        const auto sim = depth_matrix(pts, DepthKind::Cosine);
        const double global = exhaustive_two_medoid_optimum(sim);
        EXPECT_LE(dbmca::fit(sim, 2, s).objective(), global + 1e-12);
        const auto best = dbmca::fit_best_of(sim, 2, s);
        hits += std::abs(best.objective() - global) <= 1e-12;
    }
    EXPECT_GE(hits, 95);
}

TEST(Fit, ConvergenceProperties) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto mix = testsupport::vmf_mixture(3 + s % 5, 2 + s % 4, 40, 4.0, 2000 + s);
        const DepthKind kind = kAllDepthKinds[s % 3];
        const auto sim = depth_matrix(mix.points, kind);
        const std::size_t k = 2 + s % 5;
        const auto model = dbmca::fit(sim, k, s);
        ASSERT_TRUE(model.converged);
        EXPECT_LE(model.iterations, 100u);
        EXPECT_EQ(model.objective_trace.size(), model.iterations);
        for (std::size_t i = 1; i < model.objective_trace.size(); ++i) {
            EXPECT_GT(model.objective_trace[i], model.objective_trace[i - 1]);
        }
        EXPECT_EQ(dbmca::refine(sim, model.partition, model.medoid_indices), model.medoid_indices);
        for (std::size_t c = 0; c < k; ++c) EXPECT_EQ(model.partition.label(model.medoid_indices[c]), int(c));
        for (std::size_t i = 0; i < mix.points.size(); ++i) {
            const double own = sim.at(i, model.medoid_indices[static_cast<std::size_t>(model.partition.label(i))]);
            for (std::size_t m : model.medoid_indices) EXPECT_GE(own, sim.at(i, m));
        }
    }
}

TEST(Fit, IterationCapFlagsNonConvergence) {
    const auto mix = testsupport::vmf_mixture(3, 4, 50, 3.0, 10);
    const auto sim = depth_matrix(mix.points, DepthKind::Cosine);
    bool saw_cap = false;
    for (std::uint64_t s = 0; s < 20 && !saw_cap; ++s) {
        const auto full = dbmca::fit(sim, 4, s);
        if (full.iterations < 2) continue;
        dbmca::FitOptions capped;
        capped.max_iter = 1;
        const auto m = dbmca::fit(sim, 4, s, capped);
        EXPECT_FALSE(m.converged);
        EXPECT_EQ(m.iterations, 1u);
        saw_cap = true;
    }
    EXPECT_TRUE(saw_cap);
}

TEST(Fit, RotationEquivariant) {
    const auto mix = testsupport::vmf_mixture(5, 3, 30, 6.0, 11);
    const auto rotated = random_rotation(5, 12).apply(mix.points);
    for (DepthKind kind : kAllDepthKinds) {
        const auto a = dbmca::fit(depth_matrix(mix.points, kind), 3, 13);
        const auto b = dbmca::fit(depth_matrix(rotated, kind), 3, 13);
        EXPECT_EQ(a.partition, b.partition);
        EXPECT_EQ(a.medoid_indices, b.medoid_indices);
    }
}

TEST(Fit, KindsAgreeOnPointMassClusters) {
    std::vector<UnitVector> pts;
    const std::vector<UnitVector> dirs{basis(4, 0), basis(4, 1), normalize(std::vector<double>{-1.0, -1.0, 0.5, 0.0})};
    for (int rep = 0; rep < 5; ++rep) {
        for (const auto& d : dirs) pts.push_back(d);
    }
    std::vector<int> truth;
    for (int rep = 0; rep < 5; ++rep) truth.insert(truth.end(), {0, 1, 2});
    for (DepthKind kind : kAllDepthKinds) {
        const auto model = dbmca::fit_best_of(depth_matrix(pts, kind), 3, 14);
        EXPECT_EQ(validation::adjusted_rand_index(model.partition, Partition(truth)), 1.0) << to_string(kind);
    }
}

TEST(Silhouette, SeparatedCopiesScoreOne) {
    std::vector<UnitVector> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(basis(3, 0));
    for (int i = 0; i < 4; ++i) pts.push_back(-basis(3, 0));
    const auto sim = depth_matrix(pts, DepthKind::Cosine);
    const Partition p(std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1});
    const auto r = dbmca::silhouette(sim, p);
    for (double s : r.per_point) EXPECT_DOUBLE_EQ(s, 1.0);
    EXPECT_DOUBLE_EQ(r.mean, 1.0);
}

TEST(Silhouette, IdenticalPointsScoreZero) {
    const std::vector<UnitVector> pts(6, basis(3, 2));
    const auto sim = depth_matrix(pts, DepthKind::Arc);
    const auto r = dbmca::silhouette(sim, Partition(std::vector<int>{0, 1, 0, 1, 1, 0}));
    for (double s : r.per_point) EXPECT_EQ(s, 0.0);
}

TEST(Silhouette, HandComputedFourPoints) {
    // Clusters {0, 1} and {2, 3}.
    const std::vector<double> s{
        2.0, 1.5, 0.5, 0.4,  //
        1.5, 2.0, 0.4, 1.8,  //
        0.5, 0.4, 2.0, 1.0,  //
        0.4, 1.8, 1.0, 2.0,
    };
    const DepthMatrix sim(4, DepthKind::Cosine, s);
    const auto r = dbmca::silhouette(sim, Partition(std::vector<int>{0, 0, 1, 1}));
    // a' and b' per point: (1.5, 0.45), (1.5, 1.1), (1.0, 0.45), (1.0, 1.1).
    EXPECT_NEAR(r.per_point[0], 1.0 - 0.45 / 1.5, 1e-15);
    EXPECT_NEAR(r.per_point[1], 1.0 - 1.1 / 1.5, 1e-15);
    EXPECT_NEAR(r.per_point[2], 1.0 - 0.45 / 1.0, 1e-15);
    EXPECT_NEAR(r.per_point[3], 1.0 / 1.1 - 1.0, 1e-15);
    EXPECT_NEAR(r.mean, (r.per_point[0] + r.per_point[1] + r.per_point[2] + r.per_point[3]) / 4.0, 1e-15);
}

TEST(Silhouette, BoundsSingletonsAndErrors) {
    const auto pts = testsupport::uniform_points(3, 30, 15);
    Rng rng(16);
    for (DepthKind kind : kAllDepthKinds) {
        const auto sim = depth_matrix(pts, kind);
        const auto p = testsupport::random_partition(pts.size(), 5, rng);
        for (double s : dbmca::silhouette(sim, p).per_point) {
            EXPECT_GE(s, -1.0);
            EXPECT_LE(s, 1.0);
        }
        std::vector<int> labels(pts.size(), 0);
        labels[7] = 1;
        EXPECT_EQ(dbmca::silhouette(sim, Partition(labels)).per_point[7], 0.0);
        EXPECT_THROW(dbmca::silhouette(sim, Partition(std::vector<int>(pts.size(), 0))), std::invalid_argument);
    }
}

TEST(SelectK, PicksTwoForSeparatedClouds) {
    const auto clouds = testsupport::antipodal_clouds(3, 60, 40.0, 17);
    const auto sim = depth_matrix(clouds.points, DepthKind::Cosine);
    const std::vector<std::size_t> ks{2, 3, 4, 5, 6};
    const auto sel = dbmca::select_k(sim, ks, 18);
    EXPECT_EQ(sel.best_k, 2u);
    ASSERT_EQ(sel.models.size(), ks.size());
    for (std::size_t i = 1; i < ks.size(); ++i) EXPECT_GT(sel.models[0].silhouette, sel.models[i].silhouette);
    EXPECT_EQ(sel.best().partition.num_clusters(), 2u);
}

TEST(SelectK, SingleCandidateAndDeterminism) {
    const auto pts = testsupport::uniform_points(3, 4, 19);
    const auto sim = depth_matrix(pts, DepthKind::Chord);
    const std::vector<std::size_t> two{2};
    EXPECT_EQ(dbmca::select_k(sim, two, 1).best_k, 2u);

    const auto mix = testsupport::vmf_mixture(4, 3, 40, 5.0, 20);
    const auto big = depth_matrix(mix.points, DepthKind::Arc);
    const std::vector<std::size_t> ks{2, 3, 4};
    dbmca::SelectOptions serial;
    dbmca::SelectOptions threaded;
    threaded.workers = 3;
    const auto a = dbmca::select_k(big, ks, 21, serial);
    const auto b = dbmca::select_k(big, ks, 21, threaded);
    EXPECT_EQ(a.best_k, b.best_k);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        EXPECT_EQ(a.models[i].partition, b.models[i].partition);
        EXPECT_EQ(a.models[i].objective_trace, b.models[i].objective_trace);
        EXPECT_EQ(a.models[i].silhouette, b.models[i].silhouette);
    }
    EXPECT_THROW(dbmca::select_k(big, std::vector<std::size_t>{}, 1), std::invalid_argument);
    EXPECT_THROW(dbmca::select_k(big, std::vector<std::size_t>{1, 2}, 1), std::invalid_argument);
}

TEST(SelectK, BestOfRestartsNeverWorseThanAnyRestart) {
    const auto mix = testsupport::vmf_mixture(3, 4, 30, 3.0, 22);
    const auto sim = depth_matrix(mix.points, DepthKind::Cosine);
    dbmca::SelectOptions opts;
    opts.restarts = 8;
    const auto best = dbmca::fit_best_of(sim, 4, 23, opts);
    for (std::size_t r = 0; r < 8; ++r) {
        const auto single = dbmca::fit(sim, 4, derive_seed(23, {4, r}));
        EXPECT_GE(best.objective(), single.objective());
    }
}

TEST(Streaming, SameModelAsMaterialized) {
    const auto mix = testsupport::vmf_mixture(3, 3, 30, 5.0, 24);
    const auto dense = depth_matrix(mix.points, DepthKind::Cosine);
    const StreamingSimilarity<UnitVector> streaming(mix.points, DepthKind::Cosine);
    const auto a = dbmca::fit(dense, 3, 25);
    const auto b = dbmca::fit(streaming, 3, 25);
    EXPECT_EQ(a.partition, b.partition);
    EXPECT_EQ(a.objective_trace, b.objective_trace);
}
