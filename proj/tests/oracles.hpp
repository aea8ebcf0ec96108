#pragma once

// Reference computations used as test oracles. Each one is deliberately naive (enumeration or
// a direct formula) and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "pms2l/data.hpp"

namespace oracle {

inline std::vector<double> dense(const pms2l::Sample& s, std::size_t d) {
    std::vector<double> out(d, 0.0);
    for (const auto& f : s.features) {
        if (f.index < d) out[f.index] = f.value;
    }
    return out;
}

inline pms2l::Sample sample(std::vector<double> x, std::optional<int> label = std::nullopt) {
    pms2l::Sample s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) s.features.push_back({static_cast<std::uint32_t>(i), x[i]});
    }
    s.label = label;
    return s;
}

/// Fraction of disagreements under the best relabeling, by trying every permutation.
inline double matching_distance(const std::vector<int>& a, const std::vector<int>& b) {
    int G = 0;
    for (const int x : a) G = std::max(G, x + 1);
    for (const int x : b) G = std::max(G, x + 1);
    std::vector<int> perm(static_cast<std::size_t>(G));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = a.size();
    do {
        std::size_t miss = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != perm[static_cast<std::size_t>(b[i])]) ++miss;
        }
        best = std::min(best, miss);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(a.size());
}

/// Minimum assignment cost by trying every permutation.
inline std::int64_t min_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
    std::vector<int> perm(cost.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    do {
        std::int64_t total = 0;
        for (std::size_t r = 0; r < cost.size(); ++r) total += cost[r][static_cast<std::size_t>(perm[r])];
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// True when b is a consistent relabeling of a (a bijection between used labels).
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
        }
    }
    return true;
}

inline double wcss(const std::vector<std::vector<double>>& pts, const std::vector<int>& assign, int G) {
    const std::size_t d = pts.front().size();
    double total = 0.0;
    for (int g = 0; g < G; ++g) {
        std::vector<double> mean(d, 0.0);
        int count = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (assign[i] != g) continue;
            ++count;
            for (std::size_t k = 0; k < d; ++k) mean[k] += pts[i][k];
        }
        if (count == 0) continue;
        for (auto& m : mean) m /= count;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (assign[i] != g) continue;
            for (std::size_t k = 0; k < d; ++k) total += (pts[i][k] - mean[k]) * (pts[i][k] - mean[k]);
        }
    }
    return total;
}

/// Best split into two nonempty groups, by enumerating all of them.
inline std::vector<int> best_two_partition(const std::vector<std::vector<double>>& pts) {
    const std::size_t m = pts.size();
    std::vector<int> best;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (m - 1)); ++mask) {
        std::vector<int> assign(m, 0);
        for (std::size_t i = 0; i < m - 1; ++i) assign[i] = (mask >> i) & 1 ? 1 : 0;
        const double v = wcss(pts, assign, 2);
        if (v < best_value) {
            best_value = v;
            best = assign;
        }
    }
    return best;
}

/// (2/normalizer) E_sigma[B ||sum sigma_i x_i||] by enumerating all 2^m sign vectors.
inline double exact_rademacher(const std::vector<std::vector<double>>& xs, std::size_t normalizer, double B) {
    const std::size_t m = xs.size();
    if (m == 0) return 0.0;
    const std::size_t d = xs.front().size();
    double sum = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        std::vector<double> acc(d, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double s = (mask >> i) & 1 ? 1.0 : -1.0;
            for (std::size_t k = 0; k < d; ++k) acc[k] += s * xs[i][k];
        }
        double sq = 0.0;
        for (const double v : acc) sq += v * v;
        sum += B * std::sqrt(sq);
    }
    return 2.0 / static_cast<double>(normalizer) * sum / static_cast<double>(std::uint64_t{1} << m);
}

/// Exact two-sided rank-sum p-value (no ties): the share of all C(N, |a|) rank subsets whose
/// statistic is at least as far from its mean as the observed one.
inline double exact_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<std::pair<double, int>> all;
    for (const double v : a) all.push_back({v, 0});
    for (const double v : b) all.push_back({v, 1});
    std::sort(all.begin(), all.end());
    const std::size_t N = all.size();
    const std::size_t n1 = a.size();
    double observed = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (all[i].second == 0) observed += static_cast<double>(i + 1);
    }
    const double mean = static_cast<double>(n1) * static_cast<double>(N + 1) / 2.0;
    const double gap = std::abs(observed - mean);
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n1) continue;
        double r = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            if ((mask >> i) & 1) r += static_cast<double>(i + 1);
        }
        ++total;
        if (std::abs(r - mean) >= gap - 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

/// Central finite differences of f at w.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> w, double h) {
    std::vector<double> g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double keep = w[i];
        w[i] = keep + h;
        const double up = f(w);
        w[i] = keep - h;
        const double down = f(w);
        w[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// Accuracy of the classifier that predicts the class with the nearest mean.
inline double nearest_centroid_accuracy(const std::vector<pms2l::Sample>& samples, int K, std::size_t d) {
    std::vector<std::vector<double>> mean(static_cast<std::size_t>(K), std::vector<double>(d, 0.0));
    std::vector<int> count(static_cast<std::size_t>(K), 0);
    for (const auto& s : samples) {
        const auto x = dense(s, d);
        const auto y = static_cast<std::size_t>(*s.label);
        ++count[y];
        for (std::size_t k = 0; k < d; ++k) mean[y][k] += x[k];
    }
    for (std::size_t y = 0; y < mean.size(); ++y) {
        for (auto& v : mean[y]) v /= std::max(1, count[y]);
    }
    int hits = 0;
    for (const auto& s : samples) {
        const auto x = dense(s, d);
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int y = 0; y < K; ++y) {
            double dist = 0.0;
            for (std::size_t k = 0; k < d; ++k) dist += (x[k] - mean[static_cast<std::size_t>(y)][k]) * (x[k] - mean[static_cast<std::size_t>(y)][k]);
            if (dist < best_d) {
                best_d = dist;
                best = y;
            }
        }
        hits += best == *s.label ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace oracle
