#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "basketlab/accuracy.hpp"
#include "basketlab/error.hpp"
#include "basketlab/kmeans.hpp"
#include "basketlab/rng.hpp"
#include "oracles.hpp"

using namespace basketlab;

namespace {

std::vector<std::vector<double>> random_points(Rng& rng, std::size_t n,
                                               std::size_t dim) {
    std::vector<std::vector<double>> points(n, std::vector<double>(dim));
    for (auto& p : points)
        for (auto& x : p) x = rng.uniform01() * 50.0;
    return points;
}

// Four well-separated Gaussian blobs; returns points plus planted labels.
std::pair<std::vector<std::vector<double>>, std::vector<int>> four_blobs(
    std::uint64_t seed) {
    Rng rng(seed);
    const double centers[4][2] = {{0, 0}, {100, 0}, {0, 100}, {100, 100}};
    std::vector<std::vector<double>> points;
    std::vector<int> labels;
    for (int c = 0; c < 4; ++c) {
        for (int i = 0; i < 30; ++i) {
            points.push_back({centers[c][0] + rng.normal(),
                              centers[c][1] + rng.normal()});
            labels.push_back(c);
        }
    }
    return {points, labels};
}

bool same_partition(const std::vector<std::uint32_t>& got,
                    const std::vector<int>& planted) {
    std::map<int, std::uint32_t> mapping;
    std::set<std::uint32_t> used;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const auto it = mapping.find(planted[i]);
        if (it == mapping.end()) {
            if (!used.insert(got[i]).second) return false;
            mapping.emplace(planted[i], got[i]);
        } else if (it->second != got[i]) {
            return false;
        }
    }
    return true;
}

const std::vector<std::string> kTableProducts = {"fkue59", "fkue114", "fkue133",
                                                 "fkue138"};
const std::vector<std::vector<std::uint64_t>> kTablePredicted = {
    {14, 12, 11, 16, 17}, {8, 7, 8, 10, 11}, {25, 22, 26, 29, 31},
    {14, 14, 16, 16, 22}};
const std::vector<std::vector<std::uint64_t>> kTableActual = {
    {14, 16, 16, 28, 33}, {8, 4, 12, 9, 12}, {26, 30, 22, 39, 64},
    {12, 17, 14, 32, 37}};

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("k equal to the point count puts every point alone at inertia zero") {
    std::vector<std::vector<double>> points{{0, 0}, {3, 4}, {10, -2}, {-5, 5}};
    KMeansParams params;
    params.k = 4;
    params.seed = 7;
    const auto result = kmeans(points, params);
    CHECK(result.inertia == 0.0);
    std::set<std::uint32_t> distinct(result.assignments.begin(),
                                     result.assignments.end());
    CHECK(distinct.size() == 4);
}

TEST_CASE("k larger than the point count is rejected") {
    std::vector<std::vector<double>> points{{0, 0}, {1, 1}};
    KMeansParams params;
    params.k = 3;
    CHECK_THROWS_AS(kmeans(points, params), Error);
    params.k = 0;
    CHECK_THROWS_AS(kmeans(points, params), Error);
}

TEST_CASE("ragged vectors are rejected") {
    std::vector<std::vector<double>> points{{0, 0}, {1}};
    KMeansParams params;
    params.k = 1;
    CHECK_THROWS_AS(kmeans(points, params), Error);
}

TEST_CASE("planted four-blob partition is recovered with a fixed seed") {
    const auto [points, labels] = four_blobs(123);
    KMeansParams params;
    params.k = 4;
    params.seed = 42;
    const auto result = kmeans(points, params);
    CHECK(same_partition(result.assignments, labels));
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    Rng rng(51);
    const auto points = random_points(rng, 60, 4);
    KMeansParams params;
    params.k = 5;
    params.seed = 99;
    const auto a = kmeans(points, params);
    const auto b = kmeans(points, params);
    CHECK(a.assignments == b.assignments);
    CHECK(a.centroids == b.centroids);
    CHECK(a.inertia == b.inertia);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("inertia never increases across iterations") {
    Rng rng(52);
    for (int round = 0; round < 25; ++round) {
        const auto points = random_points(rng, 10 + rng.below(80), 1 + rng.below(5));
        KMeansParams params;
        params.k = 1 + static_cast<std::uint32_t>(rng.below(
                          std::min<std::uint64_t>(8, points.size())));
        params.seed = rng.next_u64();
        const auto result = kmeans(points, params);
        for (std::size_t i = 1; i < result.inertia_history.size(); ++i)
            CHECK(result.inertia_history[i] <=
                  result.inertia_history[i - 1] + 1e-9);
    }
}

TEST_CASE("final assignments are nearest-centroid with lowest-id ties") {
    Rng rng(53);
    for (int round = 0; round < 15; ++round) {
        const auto points = random_points(rng, 12 + rng.below(50), 2);
        KMeansParams params;
        params.k = 1 + static_cast<std::uint32_t>(rng.below(6));
        params.seed = rng.next_u64();
        const auto result = kmeans(points, params);
        double inertia = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::uint32_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::uint32_t c = 0; c < result.centroids.size(); ++c) {
                double d = 0.0;
                for (std::size_t j = 0; j < points[i].size(); ++j) {
                    const double diff = points[i][j] - result.centroids[c][j];
                    d += diff * diff;
                }
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            CHECK(result.assignments[i] == best);
            inertia += best_d;
        }
        CHECK(result.inertia == doctest::Approx(inertia));
    }
}

TEST_CASE("duplicate seed points trigger the empty-cluster repair") {
    // two identical points plus two far ones; whichever init is drawn, every
    // cluster must end non-empty
    std::vector<std::vector<double>> points{{0, 0}, {0, 0}, {50, 50}, {80, 80}};
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        KMeansParams params;
        params.k = 3;
        params.seed = seed;
        const auto result = kmeans(points, params);
        std::set<std::uint32_t> used(result.assignments.begin(),
                                     result.assignments.end());
        CHECK(used.size() == 3);
    }
}

TEST_CASE("serial and parallel assignment kernels agree") {
    Rng rng(54);
    for (int round = 0; round < 10; ++round) {
        const auto points = random_points(rng, 200, 6);
        const auto centroids = random_points(rng, 7, 6);
        std::vector<std::uint32_t> a1, a2;
        std::vector<double> d1, d2;
        assign_nearest_serial(points, centroids, a1, d1);
        assign_nearest(points, centroids, a2, d2);
        CHECK(a1 == a2);
        CHECK(d1 == d2);
    }
}

TEST_CASE("min-max normalization maps each vector to [0,1]") {
    const auto out = minmax_normalize({{2, 4, 6}, {5, 5, 5}});
    CHECK(out[0] == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(out[1] == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("accuracy cells from the published grid") {
    CHECK(prediction_accuracy(14, 14) == 100);
    CHECK(prediction_accuracy(12, 16) == 75);
    CHECK(prediction_accuracy(7, 4) == 57);
    CHECK(prediction_accuracy(14, 16) == 88);
    CHECK(prediction_accuracy(11, 16) == 69);
    CHECK(prediction_accuracy(17, 33) == 52);
}

TEST_CASE("accuracy is symmetric, bounded, and exact only at equality") {
    Rng rng(55);
    for (int round = 0; round < 300; ++round) {
        const auto p = rng.below(60);
        const auto r = rng.below(60);
        const int a = prediction_accuracy(static_cast<double>(p),
                                          static_cast<double>(r));
        CHECK(a == prediction_accuracy(static_cast<double>(r),
                                       static_cast<double>(p)));
        CHECK(a >= 0);
        CHECK(a <= 100);
        if (p == r) CHECK(a == 100);
    }
    CHECK(prediction_accuracy(9, 9) == 100);
    CHECK(prediction_accuracy(0, 0) == 100);
    CHECK_THROWS_AS(prediction_accuracy(-1, 5), Error);
}

TEST_CASE("full published grid reproduces every cell and the average row") {
    const auto report =
        accuracy_table(kTableProducts, kTablePredicted, kTableActual, 70);
    const std::vector<std::vector<int>> expected_pct = {
        {100, 75, 69, 57, 52},
        {100, 57, 67, 90, 92},
        {96, 73, 85, 74, 48},
        {86, 82, 88, 50, 59}};
    CHECK(report.accuracy_pct == expected_pct);
    CHECK(report.avg_predicted == std::vector<double>{15.3, 13.8, 15.3, 17.8, 20.3});
    CHECK(report.avg_actual == std::vector<double>{15.0, 16.8, 16.0, 27.0, 36.5});
    CHECK(report.avg_accuracy_pct == std::vector<int>{96, 72, 77, 68, 63});
    CHECK(report.validity_horizon == 3);
}

TEST_CASE("perfect forecasts give all-100 cells and a full horizon") {
    const std::vector<std::vector<std::uint64_t>> grid = {{3, 0, 9}};
    const auto report = accuracy_table({"only"}, grid, grid, 70);
    CHECK(report.accuracy_pct == std::vector<std::vector<int>>{{100, 100, 100}});
    CHECK(report.validity_horizon == 3);
}

TEST_CASE("random grids match the independent cell oracle") {
    Rng rng(56);
    for (int round = 0; round < 20; ++round) {
        const std::size_t products = 1 + rng.below(5);
        const std::size_t days = 1 + rng.below(6);
        std::vector<std::string> names;
        std::vector<std::vector<std::uint64_t>> predicted, actual;
        for (std::size_t p = 0; p < products; ++p) {
            names.push_back("p" + std::to_string(p));
            std::vector<std::uint64_t> prow, arow;
            for (std::size_t d = 0; d < days; ++d) {
                prow.push_back(rng.below(40));
                arow.push_back(rng.below(40));
            }
            predicted.push_back(std::move(prow));
            actual.push_back(std::move(arow));
        }
        const auto report = accuracy_table(names, predicted, actual, 70);
        for (std::size_t p = 0; p < products; ++p)
            for (std::size_t d = 0; d < days; ++d)
                CHECK(report.accuracy_pct[p][d] ==
                      oracle::accuracy_cell(predicted[p][d], actual[p][d]));
    }
}

TEST_CASE("shape mismatches are rejected") {
    CHECK_THROWS_AS(accuracy_table({"a"}, {{1, 2}}, {{1}}, 70), Error);
    CHECK_THROWS_AS(accuracy_table({"a", "b"}, {{1}}, {{1}}, 70), Error);
    CHECK_THROWS_AS(accuracy_table({}, {}, {}, 70), Error);
}

TEST_CASE("validity horizon prefix rule") {
    CHECK(validity_horizon({96, 72, 77, 68, 63}, 70) == 3);
    CHECK(validity_horizon({90, 90, 90}, 70) == 3);
    CHECK(validity_horizon({60, 99, 99}, 70) == 0);
    CHECK_THROWS_AS(validity_horizon({}, 70), Error);
}

TEST_CASE("validity horizon is non-increasing in the threshold") {
    Rng rng(57);
    for (int round = 0; round < 200; ++round) {
        std::vector<int> vec;
        const auto len = 1 + rng.below(8);
        for (std::uint64_t i = 0; i < len; ++i)
            vec.push_back(static_cast<int>(rng.below(101)));
        const int t1 = static_cast<int>(rng.below(101));
        const int t2 = static_cast<int>(rng.below(101));
        const int lo = std::min(t1, t2), hi = std::max(t1, t2);
        CHECK(validity_horizon(vec, lo) >= validity_horizon(vec, hi));
    }
}

} // TEST_SUITE
