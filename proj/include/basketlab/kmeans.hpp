#pragma once

#include <cstdint>
#include <vector>

namespace basketlab {

struct KMeansParams {
    std::uint32_t k = 4;
    std::uint64_t seed = 0;
    std::uint32_t max_iter = 300;
    double tol = 1e-6;
};

struct ClusterResult {
    std::uint32_t k = 0;
    std::vector<std::uint32_t> assignments;        // point -> cluster id
    std::vector<std::vector<double>> centroids;    // k vectors
    double inertia = 0.0;                          // sum of squared distances
    std::uint32_t iterations = 0;
    std::vector<double> inertia_history;           // after each assignment pass
};

// Nearest-centroid assignment, ties resolved to the lowest cluster id.
// OpenMP-parallel over points; every point's answer is independent, so the
// result does not depend on thread count. Returns squared distances too.
void assign_nearest(const std::vector<std::vector<double>>& points,
                    const std::vector<std::vector<double>>& centroids,
                    std::vector<std::uint32_t>& assignments,
                    std::vector<double>& sq_dists);

// Serial reference for the kernel above.
void assign_nearest_serial(const std::vector<std::vector<double>>& points,
                           const std::vector<std::vector<double>>& centroids,
                           std::vector<std::uint32_t>& assignments,
                           std::vector<double>& sq_dists);

// Lloyd iterations from seeded random-distinct-point initialization. Stops
// when assignments are stable, the largest centroid shift drops below tol, or
// max_iter is reached. An emptied cluster is reseeded to the point farthest
// from its assigned centroid. Deterministic for a given seed.
ClusterResult kmeans(const std::vector<std::vector<double>>& points,
                     const KMeansParams& params);

// Per-vector min-max scaling to [0,1]; constant vectors map to all zeros.
std::vector<std::vector<double>> minmax_normalize(
    const std::vector<std::vector<double>>& points);

} // namespace basketlab
