#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fedccfa/clustering.hpp"
#include "fedccfa/error.hpp"
#include "oracles.hpp"

using namespace fedccfa;
namespace fs = std::filesystem;

namespace {

DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    DistanceMatrix m;
    m.client_ids.resize(rows.size());
    std::iota(m.client_ids.begin(), m.client_ids.end(), std::size_t{0});
    m.values = Matrix(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) m.values(i, j) = rows[i][j];
    }
    return m;
}

std::vector<std::size_t> ids(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

TEST(CosineDistance, HandCases) {
    EXPECT_NEAR(cosine_distance(Vector{1, 0}, Vector{1, 0}), 0.0, 1e-15);
    EXPECT_NEAR(cosine_distance(Vector{1, 0}, Vector{0, 1}), 1.0, 1e-15);
    EXPECT_NEAR(cosine_distance(Vector{1, 0}, Vector{1, 1}), 1.0 - 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(cosine_distance(Vector{1, 0}, Vector{-1, 0}), 2.0, 1e-15);
}

TEST(Madd, IdenticalVectorsAreAtDistanceZero) {
    const std::vector<Vector> v(4, Vector{0.3, -1.0, 2.0});
    const auto m = madd_matrix(ids(4), v);
    EXPECT_FALSE(m.fallback);
    for (double x : m.values.values()) EXPECT_NEAR(x, 0.0, 1e-15);
}

TEST(Madd, ThreePointHandCase) {
    const std::vector<Vector> v{{1, 0}, {1, 0}, {0, 1}};
    const auto m = madd_matrix(ids(3), v);
    EXPECT_NEAR(m.values(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(m.values(0, 2), 1.0, 1e-15);
    EXPECT_NEAR(m.values(1, 2), 1.0, 1e-15);
}

TEST(Madd, EquidistantThirdPoint) {
    const std::vector<Vector> v{{1, 0}, {0, 1}, {1, 1}};
    EXPECT_NEAR(madd_matrix(ids(3), v).values(0, 1), 0.0, 1e-15);
}

TEST(Madd, SymmetricNonNegativeZeroDiagonal) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng() % 8;
        std::vector<Vector> v(n, Vector(4));
        for (auto& x : v) for (double& e : x) e = g(rng);
        const auto m = madd_matrix(ids(n), v);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(m.values(i, i), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_GE(m.values(i, j), 0.0);
                EXPECT_EQ(m.values(i, j), m.values(j, i));
                EXPECT_LE(m.values(i, j), 2.0 + 1e-12);
            }
        }
    }
}

TEST(Madd, ScaleInvariantAndPermutationEquivariant) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vector> v(6, Vector(5));
    for (auto& x : v) for (double& e : x) e = g(rng);
    const auto base = madd_matrix(ids(6), v);

    auto scaled = v;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        for (double& e : scaled[i]) e *= 0.5 + static_cast<double>(i);
    }
    const auto s = madd_matrix(ids(6), scaled);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(s.values(i, j), base.values(i, j), 1e-12);

    const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    std::vector<Vector> shuffled;
    for (auto p : perm) shuffled.push_back(v[p]);
    const auto sh = madd_matrix(ids(6), shuffled);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            EXPECT_NEAR(sh.values(i, j), base.values(perm[i], perm[j]), 1e-12);
}

TEST(Madd, FewerThanThreeFallsBackToCosine) {
    const std::vector<Vector> v{{1, 0}, {1, 1}};
    const auto m = madd_matrix(ids(2), v);
    EXPECT_TRUE(m.fallback);
    EXPECT_NEAR(m.values(0, 1), 1.0 - 1.0 / std::sqrt(2.0), 1e-15);
    const auto one = madd_matrix(ids(1), {{1, 0}});
    EXPECT_EQ(one.size(), 1u);
}

TEST(Madd, ClassifierRowsIncludeTheBias) {
    ClassClassifierSet set;
    for (std::size_t k = 0; k < 3; ++k) {
        Matrix w(2, 2);
        w(0, 0) = 1.0;
        w(1, 1) = 1.0;
        Vector b{0.0, k == 2 ? 5.0 : 0.0};
        set.add(10 + k, w, b);
    }
    EXPECT_EQ(set.class_count(), 2u);
    const auto c0 = madd_matrix(set, 0);
    for (double x : c0.values.values()) EXPECT_NEAR(x, 0.0, 1e-15);
    EXPECT_EQ(c0.client_ids, (std::vector<std::size_t>{10, 11, 12}));
    const auto c1 = madd_matrix(set, 1);
    EXPECT_NEAR(c1.values(0, 1), 0.0, 1e-15);
    EXPECT_GT(c1.values(0, 2), 0.5);
}

TEST(Dbscan, FarApartPointsAreSingletons) {
    const auto m = from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    EXPECT_EQ(dbscan(m, 0.1, 1), (Partition{{0}, {1}, {2}}));
}

TEST(Dbscan, PairAndSingleton) {
    const auto m = from_rows({{0, 0.05, 0.5}, {0.05, 0, 0.5}, {0.5, 0.5, 0}});
    EXPECT_EQ(dbscan(m, 0.1, 1), (Partition{{0, 1}, {2}}));
}

TEST(Dbscan, EpsilonBoundaryIsInclusive) {
    const auto m = from_rows({{0, 0.1, 1}, {0.1, 0, 1}, {1, 1, 0}});
    EXPECT_EQ(dbscan(m, 0.1, 1), (Partition{{0, 1}, {2}}));
}

TEST(Dbscan, ChainsAreTransitive) {
    const auto m = from_rows({{0, 0.09, 0.18}, {0.09, 0, 0.09}, {0.18, 0.09, 0}});
    EXPECT_EQ(dbscan(m, 0.1, 1), (Partition{{0, 1, 2}}));
}

TEST(Dbscan, MinSamplesOneMatchesConnectedComponents) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 0.4);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(rng);
        const auto got = dbscan(from_rows(d), 0.1, 1);
        EXPECT_EQ(got, oracle::union_find_components(d, 0.1));
    }
}

TEST(Dbscan, NoisePointsBecomeSingletonsWithLargerMinSamples) {
    // 0-1-2 form a dense core for min_samples = 3; 3 is isolated.
    const auto m = from_rows({{0, 0.05, 0.05, 1}, {0.05, 0, 0.05, 1}, {0.05, 0.05, 0, 1}, {1, 1, 1, 0}});
    EXPECT_EQ(dbscan(m, 0.1, 3), (Partition{{0, 1, 2}, {3}}));
    // A pair is not dense enough for min_samples = 3.
    const auto pair = from_rows({{0, 0.05}, {0.05, 0}});
    EXPECT_EQ(dbscan(pair, 0.1, 3), (Partition{{0}, {1}}));
}

TEST(Dbscan, BlocksCarryClientIds) {
    auto m = from_rows({{0, 0.05, 1}, {0.05, 0, 1}, {1, 1, 0}});
    m.client_ids = {7, 3, 9};
    EXPECT_EQ(dbscan(m, 0.1, 1), (Partition{{3, 7}, {9}}));
}

TEST(ClusterAll, SeparatesTwoConceptsPerClass) {
    ClassClassifierSet set;
    for (std::size_t k = 0; k < 6; ++k) {
        Matrix w(2, 3);
        const bool swapped = k >= 3;
        w(0, swapped ? 1 : 0) = 1.0;
        w(1, swapped ? 0 : 1) = 1.0;
        w(0, 2) = 0.01 * static_cast<double>(k);
        set.add(k, w, Vector{0.0, 0.0});
    }
    const auto r = cluster_all_classes(set, 0.1, 1);
    ASSERT_EQ(r.matrices.size(), 2u);
    const Partition truth{{0, 1, 2}, {3, 4, 5}};
    EXPECT_EQ(r.assignment.per_class[0], truth);
    EXPECT_EQ(r.assignment.per_class[1], truth);
    EXPECT_EQ(r.assignment.block_of(0, 4), 1u);
    EXPECT_DOUBLE_EQ(rand_index(r.assignment.per_class[0], truth), 1.0);
}

TEST(RandIndex, KnownValues) {
    const Partition a{{0, 1}, {2, 3}};
    EXPECT_DOUBLE_EQ(rand_index(a, a), 1.0);
    EXPECT_DOUBLE_EQ(rand_index(a, {{0, 1, 2, 3}}), 2.0 / 6.0);
    EXPECT_DOUBLE_EQ(rand_index(a, {{0}, {1}, {2}, {3}}), 4.0 / 6.0);
    EXPECT_DOUBLE_EQ(rand_index({{0}}, {{0}}), 1.0);
}

TEST(Canonical, SortsMembersAndBlocks) {
    EXPECT_EQ(canonical({{5, 2}, {1}, {4, 3}}), (Partition{{1}, {2, 5}, {3, 4}}));
}

TEST(DistanceCsv, HeaderThenSixDecimalRows) {
    auto m = from_rows({{0, 0.25}, {0.25, 0}});
    m.client_ids = {3, 8};
    const auto path = fs::temp_directory_path() / "fedccfa_test_distance.csv";
    write_distance_csv(path, m);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "3,8\n0.000000,0.250000\n0.250000,0.000000\n");
}
