#include "pms2l/confident.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "pms2l/error.hpp"

namespace pms2l {

ClusterMembership membership(const Partition& partition, std::span<const Sample> labeled,
                             std::span<const Sample> unlabeled) {
    partition.validate();
    if (partition.assign.size() != unlabeled.size()) {
        throw ConfigError("partition covers " + std::to_string(partition.assign.size()) +
                          " points but the unlabeled set has " + std::to_string(unlabeled.size()));
    }
    ClusterMembership m;
    m.num_clusters = partition.num_clusters;
    m.unlabeled = partition.assign;
    m.labeled = assign_all(partition, labeled);
    return m;
}

const ConfidentCluster* ConfidentClusterSet::find(int cluster_id) const noexcept {
    const auto it = std::lower_bound(
        clusters.begin(), clusters.end(), cluster_id,
        [](const ConfidentCluster& c, int id) { return c.cluster_id < id; });
    return it != clusters.end() && it->cluster_id == cluster_id ? &*it : nullptr;
}

std::vector<int> predominant_classes(std::span<const int> labels, int kappa) {
    if (labels.empty()) throw ArgumentError("predominant classes of an empty label multiset");
    if (kappa < 1) throw ArgumentError("kappa must be >= 1");
    std::map<int, std::size_t> counts;
    for (const int y : labels) ++counts[y];
    std::vector<std::pair<int, std::size_t>> ranked(counts.begin(), counts.end());
    // map order is ascending class, so a stable sort on count keeps the lower index first.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<int> out;
    for (std::size_t i = 0; i < ranked.size() && out.size() < static_cast<std::size_t>(kappa); ++i) {
        out.push_back(ranked[i].first);
    }
    return out;
}

ConfidentClusterSet identify(const ClusterMembership& members, std::span<const Sample> labeled,
                             int num_classes, int kappa, double eta) {
    if (kappa < 1) throw ConfigError("kappa must be >= 1");
    if (kappa >= num_classes) {
        throw ConfigError("kappa=" + std::to_string(kappa) + " must be below K=" +
                          std::to_string(num_classes) + " so the unlabeled margin has a complement");
    }
    if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
    if (members.labeled.size() != labeled.size()) {
        throw ConfigError("membership does not cover the labeled set");
    }
    const int G = members.num_clusters;
    const auto n = labeled.size();

    std::vector<std::vector<int>> labels_in(static_cast<std::size_t>(G));
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (!labeled[i].label) throw DataError("labeled sample " + std::to_string(i) + " has no label");
        labels_in[static_cast<std::size_t>(members.labeled[i])].push_back(*labeled[i].label);
    }
    std::vector<std::size_t> unlabeled_in(static_cast<std::size_t>(G), 0);
    for (const int g : members.unlabeled) ++unlabeled_in[static_cast<std::size_t>(g)];

    ConfidentClusterSet set;
    set.kappa = kappa;
    set.eta = eta;
    set.num_clusters = G;
    for (int g = 0; g < G; ++g) {
        const auto& labels = labels_in[static_cast<std::size_t>(g)];
        if (labels.empty()) continue;
        ConfidentCluster c;
        c.cluster_id = g;
        c.predominant = predominant_classes(labels, kappa);
        c.labeled_count = labels.size();
        c.unlabeled_count = unlabeled_in[static_cast<std::size_t>(g)];
        const auto outside = static_cast<std::size_t>(std::count_if(
            labels.begin(), labels.end(), [&](int y) {
                return std::find(c.predominant.begin(), c.predominant.end(), y) == c.predominant.end();
            }));
        c.violation_mass = static_cast<double>(outside) / static_cast<double>(n);
        // outside/n <= eta/G, cross-multiplied so the integer side stays exact.
        if (static_cast<double>(outside) * G <= eta * static_cast<double>(n)) {
            set.n_eta += c.labeled_count;
            set.u_eta += c.unlabeled_count;
            set.clusters.push_back(std::move(c));
        }
    }
    return set;
}

ConfidentClusterSet identify(const Partition& partition, std::span<const Sample> labeled,
                             std::span<const Sample> unlabeled, int num_classes, int kappa,
                             double eta) {
    return identify(membership(partition, labeled, unlabeled), labeled, num_classes, kappa, eta);
}

double eta_from_stability(double L_hat, std::size_t n, std::size_t u, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
    if (n < 2 || u < 2) throw ArgumentError("n and u must be >= 2");
    if (!(L_hat >= 0.0)) throw ArgumentError("L_hat must be >= 0");
    const double log_term = std::log(2.0 / delta);
    const double nu = static_cast<double>(u);
    return L_hat / nu + L_hat * std::sqrt(log_term / (2.0 * nu)) +
           std::sqrt(log_term / (2.0 * static_cast<double>(n)));
}

}  // namespace pms2l
