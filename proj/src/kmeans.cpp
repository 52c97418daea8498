#include "basketlab/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "basketlab/error.hpp"
#include "basketlab/rng.hpp"

namespace basketlab {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void nearest_for_point(const std::vector<double>& p,
                       const std::vector<std::vector<double>>& centroids,
                       std::uint32_t& best, double& best_d) {
    best = 0;
    best_d = std::numeric_limits<double>::infinity();
    for (std::uint32_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
}

// Means are accumulated serially in point order so results are bit-identical
// no matter how the assignment pass was partitioned.
std::vector<std::vector<double>> recompute_means(
    const std::vector<std::vector<double>>& points,
    const std::vector<std::uint32_t>& assignments,
    const std::vector<std::vector<double>>& previous, std::uint32_t k) {
    const std::size_t dim = points.front().size();
    std::vector<std::vector<double>> means(k, std::vector<double>(dim, 0.0));
    std::vector<std::uint64_t> sizes(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = assignments[i];
        ++sizes[c];
        for (std::size_t d = 0; d < dim; ++d) means[c][d] += points[i][d];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
            means[c] = previous[c]; // repaired separately
            continue;
        }
        for (std::size_t d = 0; d < dim; ++d)
            means[c][d] /= static_cast<double>(sizes[c]);
    }
    return means;
}

// Moves each empty cluster's centroid onto the point currently farthest from
// its own assigned centroid, then refreshes the assignment.
bool repair_empty_clusters(const std::vector<std::vector<double>>& points,
                           std::vector<std::vector<double>>& centroids,
                           std::vector<std::uint32_t>& assignments,
                           std::vector<double>& sq_dists, std::uint32_t k) {
    bool repaired = false;
    std::vector<bool> taken(points.size(), false);
    for (std::uint32_t c = 0; c < k; ++c) {
        bool empty = true;
        for (auto a : assignments) {
            if (a == c) {
                empty = false;
                break;
            }
        }
        if (!empty) continue;
        std::size_t farthest = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (taken[i]) continue;
            if (sq_dists[i] > far_d) {
                far_d = sq_dists[i];
                farthest = i;
            }
        }
        centroids[c] = points[farthest];
        taken[farthest] = true;
        repaired = true;
    }
    if (repaired) assign_nearest(points, centroids, assignments, sq_dists);
    return repaired;
}

} // namespace

void assign_nearest_serial(const std::vector<std::vector<double>>& points,
                           const std::vector<std::vector<double>>& centroids,
                           std::vector<std::uint32_t>& assignments,
                           std::vector<double>& sq_dists) {
    assignments.resize(points.size());
    sq_dists.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        nearest_for_point(points[i], centroids, assignments[i], sq_dists[i]);
}

void assign_nearest(const std::vector<std::vector<double>>& points,
                    const std::vector<std::vector<double>>& centroids,
                    std::vector<std::uint32_t>& assignments,
                    std::vector<double>& sq_dists) {
    assignments.resize(points.size());
    sq_dists.resize(points.size());
    const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        nearest_for_point(points[idx], centroids, assignments[idx], sq_dists[idx]);
    }
}

ClusterResult kmeans(const std::vector<std::vector<double>>& points,
                     const KMeansParams& params) {
    if (params.k < 1) throw Error::data("k must be at least 1");
    if (points.empty() || params.k > points.size())
        throw Error::data("k = " + std::to_string(params.k) +
                          " exceeds the number of vectors (" +
                          std::to_string(points.size()) + ")");
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim) throw Error::data("vectors must share one dimension");

    Rng rng(params.seed);
    const auto seeds = sample_distinct(rng, static_cast<std::uint32_t>(points.size()),
                                       params.k);
    ClusterResult result;
    result.k = params.k;
    result.centroids.reserve(params.k);
    for (auto s : seeds) result.centroids.push_back(points[s]);

    std::vector<double> sq_dists;
    assign_nearest(points, result.centroids, result.assignments, sq_dists);
    repair_empty_clusters(points, result.centroids, result.assignments, sq_dists,
                          params.k);
    double inertia = 0.0;
    for (double d : sq_dists) inertia += d;
    result.inertia_history.push_back(inertia);

    std::vector<std::uint32_t> prev_assignments = result.assignments;
    for (std::uint32_t iter = 0; iter < params.max_iter; ++iter) {
        const auto means =
            recompute_means(points, result.assignments, result.centroids, params.k);
        double shift = 0.0;
        for (std::uint32_t c = 0; c < params.k; ++c)
            shift = std::max(shift,
                             std::sqrt(squared_distance(means[c], result.centroids[c])));
        result.centroids = means;

        assign_nearest(points, result.centroids, result.assignments, sq_dists);
        repair_empty_clusters(points, result.centroids, result.assignments, sq_dists,
                              params.k);
        inertia = 0.0;
        for (double d : sq_dists) inertia += d;
        result.inertia_history.push_back(inertia);
        ++result.iterations;

        const bool stable = result.assignments == prev_assignments;
        prev_assignments = result.assignments;
        if (stable || shift < params.tol) break;
    }

    result.inertia = result.inertia_history.back();
    return result;
}

std::vector<std::vector<double>> minmax_normalize(
    const std::vector<std::vector<double>>& points) {
    std::vector<std::vector<double>> out = points;
    for (auto& v : out) {
        if (v.empty()) continue;
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const double lo = *lo_it, hi = *hi_it;
        if (hi == lo) {
            std::fill(v.begin(), v.end(), 0.0);
            continue;
        }
        for (double& x : v) x = (x - lo) / (hi - lo);
    }
    return out;
}

} // namespace basketlab
