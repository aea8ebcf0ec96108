#include "pms2l/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pms2l/assignment.hpp"
#include "pms2l/error.hpp"
#include "pms2l/parallel.hpp"
#include "pms2l/rng.hpp"

namespace pms2l {

void Partition::validate() const {
    if (num_clusters < 1) throw ConfigError("partition needs at least one cluster");
    for (const int g : assign) {
        if (g < 0 || g >= num_clusters) {
            throw ConfigError("cluster id " + std::to_string(g) + " out of range");
        }
    }
    if (has_centers() && static_cast<int>(centers.size()) != num_clusters) {
        throw ConfigError("partition has " + std::to_string(centers.size()) + " centers for " +
                          std::to_string(num_clusters) + " clusters");
    }
}

void Clusterer::validate() const {
    if (num_clusters < 1) throw ConfigError("number of clusters must be >= 1");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
}

namespace {

double squared_distance(const Sample& x, std::span<const double> center) {
    double s = 0.0;
    auto it = x.features.begin();
    const auto end = x.features.end();
    for (std::size_t j = 0; j < center.size(); ++j) {
        double diff = center[j];
        if (it != end && it->index == j) {
            diff -= it->value;
            ++it;
        }
        s += diff * diff;
    }
    for (; it != end; ++it) s += it->value * it->value;
    return s;
}

std::vector<double> densify(const Sample& x, std::size_t dim) {
    std::vector<double> out(dim, 0.0);
    for (const auto& f : x.features) {
        if (f.index < dim) out[f.index] = f.value;
    }
    return out;
}

int nearest(const Sample& x, const std::vector<std::vector<double>>& centers, double* dist = nullptr) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < centers.size(); ++g) {
        const double d = squared_distance(x, centers[g]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(g);
        }
    }
    if (dist) *dist = best_d;
    return best;
}

std::vector<std::vector<double>> kmeanspp_init(std::span<const Sample> points, int G,
                                               std::size_t dim, Rng& rng) {
    std::vector<std::vector<double>> centers;
    centers.reserve(static_cast<std::size_t>(G));
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    centers.push_back(densify(points[pick(rng)], dim));

    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centers[0]);
    while (static_cast<int>(centers.size()) < G) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> unit(0.0, total);
            const double target = unit(rng);
            double run = 0.0;
            chosen = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                run += d2[i];
                if (run > target && d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            // Every point coincides with a center already; any choice is as good.
            chosen = pick(rng);
        }
        centers.push_back(densify(points[chosen], dim));
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
        }
    }
    return centers;
}

}  // namespace

KMeansTrace fit_kmeans_traced(std::span<const Sample> points, const Clusterer& cfg) {
    cfg.validate();
    const int G = cfg.num_clusters;
    if (points.size() < static_cast<std::size_t>(G)) {
        throw ConfigError("k-means needs at least as many points (" +
                          std::to_string(points.size()) + ") as clusters (" + std::to_string(G) +
                          ")");
    }
    std::size_t dim = 0;
    for (const auto& p : points) dim = std::max(dim, p.extent());

    auto rng = make_rng(cfg.seed, stream::cluster);
    auto centers = kmeanspp_init(points, G, dim, rng);

    KMeansTrace trace;
    std::vector<int> labels(points.size(), 0);
    std::vector<double> dist(points.size(), 0.0);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(G));
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            labels[i] = nearest(points[i], centers, &dist[i]);
            ++sizes[static_cast<std::size_t>(labels[i])];
        }
        // Refill empty clusters with the currently worst-served point.
        for (int g = 0; g < G; ++g) {
            if (sizes[static_cast<std::size_t>(g)] > 0) continue;
            std::size_t worst = points.size();
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (sizes[static_cast<std::size_t>(labels[i])] < 2) continue;
                if (worst == points.size() || dist[i] > dist[worst]) worst = i;
            }
            --sizes[static_cast<std::size_t>(labels[worst])];
            labels[worst] = g;
            dist[worst] = 0.0;
            sizes[static_cast<std::size_t>(g)] = 1;
            centers[static_cast<std::size_t>(g)] = densify(points[worst], dim);
        }

        std::vector<std::vector<double>> means(static_cast<std::size_t>(G),
                                               std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto& m = means[static_cast<std::size_t>(labels[i])];
            for (const auto& f : points[i].features) m[f.index] += f.value;
        }
        double movement = 0.0;
        for (std::size_t g = 0; g < means.size(); ++g) {
            double shift = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                means[g][j] /= double(sizes[g]);
                const double d = means[g][j] - centers[g][j];
                shift += d * d;
            }
            movement = std::max(movement, std::sqrt(shift));
        }
        centers = std::move(means);
        ++trace.iterations;

        double wcss = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            wcss += squared_distance(points[i], centers[static_cast<std::size_t>(labels[i])]);
        }
        trace.objective.push_back(wcss);
        if (movement < cfg.tolerance) break;
    }

    trace.partition.num_clusters = G;
    trace.partition.assign = std::move(labels);
    trace.partition.centers = std::move(centers);
    return trace;
}

Partition fit_kmeans(std::span<const Sample> points, const Clusterer& cfg) {
    return fit_kmeans_traced(points, cfg).partition;
}

Partition fit_clusterer(std::span<const Sample> points, const Clusterer& cfg) {
    switch (cfg.method) {
        case ClusterMethod::KMeans:
            return fit_kmeans(points, cfg);
    }
    throw UnsupportedError("unknown clustering method");
}

int assign(const Partition& partition, const Sample& x) {
    if (!partition.has_centers()) {
        throw UnsupportedError("partition has no centers; cannot assign new points");
    }
    return nearest(x, partition.centers);
}

std::vector<int> assign_all(const Partition& partition, std::span<const Sample> points) {
    std::vector<int> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(assign(partition, p));
    return out;
}

double within_cluster_sum_of_squares(std::span<const Sample> points, const Partition& partition) {
    if (points.size() != partition.assign.size()) {
        throw ArgumentError("partition does not cover the given points");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        s += squared_distance(points[i], partition.centers[static_cast<std::size_t>(partition.assign[i])]);
    }
    return s;
}

double minimal_matching_distance(std::span<const int> a, std::span<const int> b) {
    if (a.empty()) throw ArgumentError("minimal matching distance needs a nonempty eval set");
    if (a.size() != b.size()) throw ArgumentError("clusterings cover different numbers of points");
    int size = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || b[i] < 0) throw ArgumentError("negative cluster id");
        size = std::max({size, a[i] + 1, b[i] + 1});
    }
    IntMatrix agreement(size);
    for (std::size_t i = 0; i < a.size(); ++i) ++agreement(a[i], b[i]);
    const auto matched = max_assignment_weight(agreement);
    // count the disagreements first so equal counts give bit-equal distances
    const auto mismatched = static_cast<std::int64_t>(a.size()) - matched;
    return static_cast<double>(mismatched) / static_cast<double>(a.size());
}

double minimal_matching_distance(const Partition& a, const Partition& b,
                                 std::span<const Sample> eval_set) {
    if (eval_set.empty()) throw ArgumentError("minimal matching distance needs a nonempty eval set");
    const auto la = assign_all(a, eval_set);
    const auto lb = assign_all(b, eval_set);
    return minimal_matching_distance(la, lb);
}

namespace {

std::vector<Sample> gather(std::span<const Sample> pool, std::span<const std::size_t> idx) {
    std::vector<Sample> out;
    out.reserve(idx.size());
    for (const auto i : idx) out.push_back(pool[i]);
    return out;
}

}  // namespace

double estimate_bounded_difference(const Clusterer& cfg, std::span<const Sample> pool,
                                   std::size_t sample_size, std::size_t eval_size, int trials,
                                   std::uint64_t seed, unsigned jobs) {
    cfg.validate();
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    if (sample_size < 1 || eval_size < 1) throw ArgumentError("sample and eval sizes must be >= 1");
    if (pool.size() < sample_size + eval_size + 1) {
        throw ArgumentError("pool of " + std::to_string(pool.size()) +
                            " is too small for disjoint draws of " +
                            std::to_string(sample_size + eval_size + 1));
    }

    std::vector<double> distance(static_cast<std::size_t>(trials), 0.0);
    parallel_for(distance.size(), jobs, [&](std::size_t t) {
        auto rng = make_rng(seed, derive_seed(stream::stability, t));
        std::vector<std::size_t> perm(pool.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);

        std::vector<std::size_t> z(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(sample_size));
        std::sort(z.begin(), z.end());
        const std::size_t fresh = perm[sample_size];
        std::vector<std::size_t> eval(perm.begin() + static_cast<std::ptrdiff_t>(sample_size + 1),
                                      perm.begin() + static_cast<std::ptrdiff_t>(sample_size + 1 + eval_size));
        std::uniform_int_distribution<std::size_t> pos(0, sample_size - 1);
        auto z_prime = z;
        z_prime[pos(rng)] = fresh;

        const auto part_z = fit_clusterer(gather(pool, z), cfg);
        const auto part_zp = fit_clusterer(gather(pool, z_prime), cfg);
        distance[t] = minimal_matching_distance(part_z, part_zp, gather(pool, eval));
    });
    double sum = 0.0;
    for (const double d : distance) sum += d;
    return static_cast<double>(sample_size) * sum / trials;
}

StabilityEstimate estimate_stability(const Clusterer& cfg, std::span<const Sample> pool,
                                     std::size_t sample_size, std::span<const Sample> eval_set,
                                     int trials, std::uint64_t seed, unsigned jobs) {
    cfg.validate();
    if (trials < 1) throw ArgumentError("trials must be >= 1");
    if (eval_set.empty()) throw ArgumentError("stability needs a nonempty eval set");
    if (sample_size < 1 || sample_size > pool.size()) {
        throw ArgumentError("sample_size must lie in [1, |pool|]");
    }

    StabilityEstimate est;
    est.trials = trials;
    est.reference = fit_clusterer(pool, cfg);

    std::vector<double> distance(static_cast<std::size_t>(trials), 0.0);
    parallel_for(distance.size(), jobs, [&](std::size_t t) {
        auto rng = make_rng(seed, derive_seed(stream::stability + 100, t));
        std::vector<std::size_t> perm(pool.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        perm.resize(sample_size);
        // Keep pool order so that sample_size == |pool| reproduces the reference fit exactly.
        std::sort(perm.begin(), perm.end());
        const auto part = fit_clusterer(gather(pool, perm), cfg);
        distance[t] = minimal_matching_distance(part, est.reference, eval_set);
    });
    double sum = 0.0;
    for (const double d : distance) sum += d;
    est.delta_hat = sum / trials;
    est.L_hat = static_cast<double>(sample_size) * est.delta_hat;
    return est;
}

}  // namespace pms2l
