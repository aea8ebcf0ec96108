#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "pms2l/clustering.hpp"
#include "pms2l/confident.hpp"
#include "pms2l/data.hpp"
#include "pms2l/model.hpp"

namespace pms2l {

/// h(x, y) - max_{y' != y} h(x, y').
double margin(std::span<const double> scores, int y);

/// max over `predominant` minus max over its complement. `predominant` must be a nonempty
/// strict subset of the classes.
double unlabeled_margin(std::span<const double> scores, std::span<const int> predominant);

/// Ramp loss: 1 for z <= 0, 1 - z/rho on (0, rho), 0 for z >= rho.
double phi_rho(double z, double rho);

struct ClusterRisk {
    double labeled_part = 0.0;    // (1/n) sum over labeled samples in the cluster
    double unlabeled_part = 0.0;  // (1/u) sum over unlabeled samples in the cluster
    double total = 0.0;
};

struct RiskBreakdown {
    double labeled_term = 0.0;
    double penalty_term = 0.0;
    double total = 0.0;
    std::map<int, ClusterRisk> per_cluster;  // confident clusters only
    double labeled_outside = 0.0;            // labeled loss outside the confident clusters
};

/// Labeled ramp loss plus the cluster penalty over confident clusters, with the 1/n and 1/u
/// normalizers. Holds non-owning views of the samples: they must outlive the objective.
class PenalizedObjective {
public:
    PenalizedObjective(std::span<const Sample> labeled, std::vector<int> labeled_clusters,
                       std::span<const Sample> unlabeled, std::vector<int> unlabeled_clusters,
                       ConfidentClusterSet confident, int num_classes);

    /// Labeled term only; what the supervised baseline minimizes.
    static PenalizedObjective supervised(std::span<const Sample> labeled, int num_classes);

    RiskBreakdown risk(const LinearModel& model, double rho) const;

    /// Total objective; when `grad` is given it receives a K x d subgradient (row-major).
    /// Kinks (margin exactly 0 or rho) take the slope of the linear branch.
    double evaluate(const LinearModel& model, double rho, std::vector<double>* grad) const;

    int num_classes() const noexcept { return num_classes_; }
    std::size_t n() const noexcept { return labeled_.size(); }
    std::size_t u() const noexcept { return unlabeled_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    const ConfidentClusterSet& confident() const noexcept { return confident_; }

private:
    struct PenalizedPoint {
        std::size_t sample;
        std::size_t slot;  // index into confident_.clusters
    };

    std::span<const Sample> labeled_;
    std::span<const Sample> unlabeled_;
    std::vector<int> labeled_cluster_;
    ConfidentClusterSet confident_;
    std::vector<std::vector<char>> in_kappa_;  // per confident slot, size K
    std::vector<PenalizedPoint> penalized_;
    int num_classes_ = 0;
    std::size_t dimension_ = 0;
};

RiskBreakdown penalized_risk(const LinearModel& model, std::span<const Sample> labeled,
                             std::span<const Sample> unlabeled, const Partition& partition,
                             const ConfidentClusterSet& confident, double rho);

std::vector<double> subgradient(const LinearModel& model, std::span<const Sample> labeled,
                                std::span<const Sample> unlabeled, const Partition& partition,
                                const ConfidentClusterSet& confident, double rho);

}  // namespace pms2l
