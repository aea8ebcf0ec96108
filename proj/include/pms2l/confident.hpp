#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pms2l/clustering.hpp"
#include "pms2l/data.hpp"

namespace pms2l {

/// Cluster ids of the labeled and unlabeled training samples under one partition.
struct ClusterMembership {
    int num_clusters = 0;
    std::vector<int> labeled;
    std::vector<int> unlabeled;
};

/// The partition must have been fit on `unlabeled` (its assign vector indexes that set);
/// labeled samples are placed with assign().
ClusterMembership membership(const Partition& partition, std::span<const Sample> labeled,
                             std::span<const Sample> unlabeled);

struct ConfidentCluster {
    int cluster_id = 0;
    std::vector<int> predominant;  // most frequent first
    std::size_t labeled_count = 0;
    std::size_t unlabeled_count = 0;
    double violation_mass = 0.0;
};

struct ConfidentClusterSet {
    std::vector<ConfidentCluster> clusters;  // ascending cluster_id
    int kappa = 0;
    double eta = 0.0;
    int num_clusters = 0;
    std::size_t n_eta = 0;
    std::size_t u_eta = 0;

    const ConfidentCluster* find(int cluster_id) const noexcept;
    bool empty() const noexcept { return clusters.empty(); }
};

/// The kappa most frequent classes; ties go to the lower class index.
std::vector<int> predominant_classes(std::span<const int> labels, int kappa);

/// A cluster is kept when it holds at least one labeled sample and the labeled mass outside
/// its predominant classes, as a fraction of all n labeled samples, is at most eta / G.
ConfidentClusterSet identify(const ClusterMembership& members, std::span<const Sample> labeled,
                             int num_classes, int kappa, double eta);
ConfidentClusterSet identify(const Partition& partition, std::span<const Sample> labeled,
                             std::span<const Sample> unlabeled, int num_classes, int kappa,
                             double eta);

/// Right-hand side of the clustering-stability deviation bound:
/// L/u + L sqrt(log(2/delta)/(2u)) + sqrt(log(2/delta)/(2n)).
double eta_from_stability(double L_hat, std::size_t n, std::size_t u, double delta);

}  // namespace pms2l
