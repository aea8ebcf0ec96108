#pragma once

// Small random objective instances shared by the unit tests and the acceptance runner.

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pms2l/confident.hpp"
#include "pms2l/model.hpp"
#include "pms2l/objective.hpp"

namespace instances {

struct Instance {
    int K = 3;
    std::size_t d = 3;
    std::vector<pms2l::Sample> labeled;
    std::vector<int> labeled_clusters;
    std::vector<pms2l::Sample> unlabeled;
    std::vector<int> unlabeled_clusters;
    pms2l::ConfidentClusterSet confident;

    pms2l::PenalizedObjective objective() const {
        return {labeled, labeled_clusters, unlabeled, unlabeled_clusters, confident, K};
    }
};

/// Dense Gaussian points; G = 3 clusters of which 0 and 2 are confident with random
/// predominant sets of size 1 or 2.
inline Instance random_instance(std::mt19937_64& rng) {
    Instance in;
    in.K = 3 + static_cast<int>(rng() % 2);
    in.d = 2 + rng() % 3;
    std::normal_distribution<double> g(0.0, 1.0);
    const int G = 3;
    const std::size_t n = 3 + rng() % 6;
    const std::size_t u = 3 + rng() % 8;
    auto point = [&] {
        std::vector<double> x(in.d);
        for (auto& v : x) v = g(rng);
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        in.labeled.push_back(oracle::sample(point(), static_cast<int>(rng() % static_cast<std::uint64_t>(in.K))));
        in.labeled_clusters.push_back(static_cast<int>(rng() % G));
    }
    for (std::size_t i = 0; i < u; ++i) {
        in.unlabeled.push_back(oracle::sample(point()));
        in.unlabeled_clusters.push_back(static_cast<int>(rng() % G));
    }
    in.confident.num_clusters = G;
    in.confident.kappa = 2;
    for (const int id : {0, 2}) {
        pms2l::ConfidentCluster c;
        c.cluster_id = id;
        c.predominant = {static_cast<int>(rng() % static_cast<std::uint64_t>(in.K))};
        if (rng() % 2 == 0) c.predominant.push_back((c.predominant[0] + 1) % in.K);
        in.confident.clusters.push_back(c);
    }
    return in;
}

inline pms2l::LinearModel random_model(std::mt19937_64& rng, int K, std::size_t d, double scale) {
    auto m = pms2l::LinearModel::zeros(K, d, 1e6, 1.0);
    std::normal_distribution<double> g(0.0, scale);
    for (auto& w : m.weights) w = g(rng);
    return m;
}

/// True when every score gap that enters the objective (ramp kinks at 0 and rho, and ties in
/// either max) is at least `gap` away from a nondifferentiable point.
inline bool away_from_kinks(const Instance& in, const pms2l::LinearModel& m, double rho, double gap) {
    auto clear = [&](const std::vector<double>& s, const std::vector<int>& group) {
        std::vector<char> in_group(s.size(), 0);
        for (const int y : group) in_group[static_cast<std::size_t>(y)] = 1;
        double best_in = -1e300, second_in = -1e300, best_out = -1e300, second_out = -1e300;
        for (std::size_t k = 0; k < s.size(); ++k) {
            double& best = in_group[k] ? best_in : best_out;
            double& second = in_group[k] ? second_in : second_out;
            if (s[k] > best) {
                second = best;
                best = s[k];
            } else if (s[k] > second) {
                second = s[k];
            }
        }
        const double mar = best_in - best_out;
        if (std::abs(mar) < gap || std::abs(mar - rho) < gap) return false;
        if (best_in - second_in < gap || best_out - second_out < gap) return false;
        return true;
    };
    for (const auto& x : in.labeled) {
        if (!clear(pms2l::score(m, x), {*x.label})) return false;
    }
    for (std::size_t i = 0; i < in.unlabeled.size(); ++i) {
        const auto* c = in.confident.find(in.unlabeled_clusters[i]);
        if (c && !clear(pms2l::score(m, in.unlabeled[i]), c->predominant)) return false;
    }
    return true;
}

/// Relative deviation ||g - fd|| / ||g|| between the analytic subgradient and central
/// differences; 0 when both vanish (a flat region).
inline double subgradient_error(const Instance& in, const pms2l::LinearModel& m, double rho) {
    const auto obj = in.objective();
    std::vector<double> grad;
    obj.evaluate(m, rho, &grad);
    const auto fd = oracle::finite_difference(
        [&](const std::vector<double>& w) {
            auto copy = m;
            copy.weights = w;
            return obj.risk(copy, rho).total;
        },
        m.weights, 1e-6);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        diff += (grad[i] - fd[i]) * (grad[i] - fd[i]);
        norm += grad[i] * grad[i];
    }
    if (norm == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
    return std::sqrt(diff / norm);
}

}  // namespace instances
