#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pms2l/data.hpp"

namespace pms2l {

/// Hard clustering of a training set: `assign[i]` is the cluster of the i-th fitted point.
/// Centroid methods also carry `centers`, which extend the clustering to new points.
struct Partition {
    int num_clusters = 0;
    std::vector<int> assign;
    std::vector<std::vector<double>> centers;

    bool has_centers() const noexcept { return !centers.empty(); }
    void validate() const;
};

enum class ClusterMethod { KMeans };

struct Clusterer {
    ClusterMethod method = ClusterMethod::KMeans;
    int num_clusters = 1;
    int max_iters = 100;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;

    void validate() const;
};

struct KMeansTrace {
    Partition partition;
    /// Within-cluster sum of squares after every Lloyd iteration (assignment + mean update).
    std::vector<double> objective;
    int iterations = 0;
};

/// Lloyd's algorithm from a k-means++ start. Deterministic per cfg.seed. Empty clusters are
/// refilled with the point farthest from its center, so every cluster in the output is used.
KMeansTrace fit_kmeans_traced(std::span<const Sample> points, const Clusterer& cfg);
Partition fit_kmeans(std::span<const Sample> points, const Clusterer& cfg);

/// Dispatches on cfg.method. This is the seam for alternative clustering algorithms.
Partition fit_clusterer(std::span<const Sample> points, const Clusterer& cfg);

/// Nearest center; ties go to the lowest cluster id.
int assign(const Partition& partition, const Sample& x);
std::vector<int> assign_all(const Partition& partition, std::span<const Sample> points);

double within_cluster_sum_of_squares(std::span<const Sample> points, const Partition& partition);

/// Minimal matching distance between two label vectors of equal length: the fraction of points
/// on which they disagree under the best relabeling. Solved exactly as an assignment problem
/// on the agreement matrix; label sets of different size are padded with empty clusters.
double minimal_matching_distance(std::span<const int> a, std::span<const int> b);

/// Same, with both partitions evaluated on `eval_set` through assign().
double minimal_matching_distance(const Partition& a, const Partition& b,
                                 std::span<const Sample> eval_set);

/// L_hat = sample_size * mean over trials of the distance between fits on Z and on Z', where
/// Z' replaces one random point of Z by a fresh pool point, measured on a fresh eval set.
double estimate_bounded_difference(const Clusterer& cfg, std::span<const Sample> pool,
                                   std::size_t sample_size, std::size_t eval_size, int trials,
                                   std::uint64_t seed, unsigned jobs = 1);

struct StabilityEstimate {
    /// sample_size * delta_hat: the constant the observed distance implies for E[d] <= L/|Z|.
    double L_hat = 0.0;
    double delta_hat = 0.0;
    int trials = 0;
    /// Fit on the whole pool; stands in for the (uncomputable) limit clustering.
    Partition reference;
};

StabilityEstimate estimate_stability(const Clusterer& cfg, std::span<const Sample> pool,
                                     std::size_t sample_size, std::span<const Sample> eval_set,
                                     int trials, std::uint64_t seed, unsigned jobs = 1);

}  // namespace pms2l
