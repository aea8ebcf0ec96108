#pragma once

#include <cstdint>
#include <vector>

#include "pms2l/clustering.hpp"
#include "pms2l/confident.hpp"
#include "pms2l/data.hpp"
#include "pms2l/model.hpp"
#include "pms2l/objective.hpp"

namespace pms2l {

/// 9 budgets log-spaced over [1e-2, 1e2].
std::vector<double> default_budget_grid();

struct TrainConfig {
    int iterations = 500;
    double step_scale = 1.0;  // step at iteration t is step_scale / sqrt(t)
    double norm_budget = 1.0;
    double rho = 1.0;
    std::uint64_t seed = 0;  // only drives fold assignment in select_budget
    int cv_folds = 5;
    std::vector<double> budget_grid = default_budget_grid();

    void validate() const;
};

struct TrainTrace {
    std::vector<double> objective;  // penalized risk of W_2 .. W_{T+1}
    int best_iteration = 0;         // index into objective
};

/// Full-batch projected subgradient descent from W_1 = 0:
///   W_{t+1} = Proj_{||W||_F <= B}(W_t - step_scale / sqrt(t) * g_t),  t = 1..T,
/// returning the post-step iterate with the lowest objective (earliest on ties).
LinearModel fit(const PenalizedObjective& objective, std::size_t dimension, const TrainConfig& cfg,
                TrainTrace* trace = nullptr);

LinearModel fit(const Dataset& data, const Partition& partition,
                const ConfidentClusterSet& confident, const TrainConfig& cfg);

/// fit() with the penalty switched off.
LinearModel fit_supervised(const Dataset& data, const TrainConfig& cfg);

/// Stratified k-fold choice of the norm budget: mean validation accuracy per grid point,
/// training on each fold's complement plus the full unlabeled penalty. Ties go to the smaller
/// budget. An empty confident set gives the supervised selection.
double select_budget(const Dataset& data, const Partition& partition,
                     const ConfidentClusterSet& confident, const TrainConfig& cfg,
                     unsigned jobs = 1);
double select_budget_supervised(const Dataset& data, const TrainConfig& cfg, unsigned jobs = 1);

}  // namespace pms2l
