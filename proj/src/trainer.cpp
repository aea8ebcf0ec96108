#include "pms2l/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pms2l/error.hpp"
#include "pms2l/parallel.hpp"
#include "pms2l/rng.hpp"

namespace pms2l {

std::vector<double> default_budget_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 9; ++i) grid.push_back(std::pow(10.0, -2.0 + 0.5 * i));
    return grid;
}

void TrainConfig::validate() const {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(step_scale > 0.0)) throw ConfigError("step_scale must be > 0");
    if (!(norm_budget > 0.0)) throw ConfigError("norm budget must be > 0");
    if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
    if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
    for (const double b : budget_grid) {
        if (!(b > 0.0)) throw ConfigError("budget grid entries must be > 0");
    }
}

LinearModel fit(const PenalizedObjective& objective, std::size_t dimension, const TrainConfig& cfg,
                TrainTrace* trace) {
    cfg.validate();
    if (objective.dimension() > dimension) {
        throw ConfigError("data dimension " + std::to_string(objective.dimension()) +
                          " exceeds model dimension " + std::to_string(dimension));
    }
    auto current = LinearModel::zeros(objective.num_classes(), dimension, cfg.norm_budget, cfg.rho);
    LinearModel best = current;
    double best_value = 0.0;
    std::vector<double> grad;
    if (trace) *trace = {};

    objective.evaluate(current, cfg.rho, &grad);
    for (int t = 1; t <= cfg.iterations; ++t) {
        const double step = cfg.step_scale / std::sqrt(static_cast<double>(t));
        for (std::size_t i = 0; i < current.weights.size(); ++i) current.weights[i] -= step * grad[i];
        const double norm = current.frobenius_norm();
        if (norm > cfg.norm_budget) {
            const double scale = cfg.norm_budget / norm;
            for (double& w : current.weights) w *= scale;
        }
        // One pass yields both the value of W_{t+1} and the subgradient for the next step.
        const double value = objective.evaluate(current, cfg.rho, t < cfg.iterations ? &grad : nullptr);
        if (trace) trace->objective.push_back(value);
        if (t == 1 || value < best_value) {
            best_value = value;
            best.weights = current.weights;
            if (trace) trace->best_iteration = t - 1;
        }
    }
    return best;
}

namespace {

void check_partition(const Dataset& data, const Partition& partition,
                     const ConfidentClusterSet& confident) {
    if (partition.has_centers() && !partition.centers.empty() &&
        partition.centers.front().size() > data.dimension) {
        throw ConfigError("partition dimension " + std::to_string(partition.centers.front().size()) +
                          " exceeds data dimension " + std::to_string(data.dimension));
    }
    if (!confident.empty() && confident.num_clusters != partition.num_clusters) {
        throw ConfigError("confident set was built for " + std::to_string(confident.num_clusters) +
                          " clusters, partition has " + std::to_string(partition.num_clusters));
    }
}

double accuracy_on(const LinearModel& model, std::span<const Sample> samples) {
    std::size_t hits = 0;
    for (const auto& s : samples) hits += predict(model, s) == *s.label ? 1 : 0;
    return samples.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(samples.size());
}

// fold[i] for each labeled sample: per class, shuffled then dealt round-robin.
std::vector<int> stratified_folds(const Dataset& data, int folds, std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.num_classes));
    for (std::size_t i = 0; i < data.labeled.size(); ++i) {
        by_class[static_cast<std::size_t>(*data.labeled[i].label)].push_back(i);
    }
    for (std::size_t k = 0; k < by_class.size(); ++k) {
        const auto count = by_class[k].size();
        if (count > 0 && count < static_cast<std::size_t>(folds)) {
            throw ConfigError("class " + std::to_string(k) + " has " + std::to_string(count) +
                              " labeled samples, fewer than cv_folds=" + std::to_string(folds));
        }
    }
    auto rng = make_rng(seed, stream::folds);
    std::vector<int> fold(data.labeled.size(), 0);
    int next = 0;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (const auto i : members) {
            fold[i] = next;
            next = (next + 1) % folds;
        }
    }
    return fold;
}

double select(const Dataset& data, const ClusterMembership* members,
              const ConfidentClusterSet& confident, const TrainConfig& cfg, unsigned jobs) {
    cfg.validate();
    auto grid = cfg.budget_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty()) throw ConfigError("budget grid is empty");
    if (grid.size() == 1) return grid.front();

    const auto fold = stratified_folds(data, cfg.cv_folds, cfg.seed);
    struct FoldData {
        std::vector<Sample> train, valid;
        std::vector<int> train_clusters;
    };
    std::vector<FoldData> folds(static_cast<std::size_t>(cfg.cv_folds));
    for (std::size_t i = 0; i < data.labeled.size(); ++i) {
        for (int f = 0; f < cfg.cv_folds; ++f) {
            auto& fd = folds[static_cast<std::size_t>(f)];
            if (fold[i] == f) {
                fd.valid.push_back(data.labeled[i]);
            } else {
                fd.train.push_back(data.labeled[i]);
                fd.train_clusters.push_back(members ? members->labeled[i] : -1);
            }
        }
    }

    const auto cells = grid.size() * folds.size();
    std::vector<double> acc(cells, 0.0);
    parallel_for(cells, jobs, [&](std::size_t cell) {
        const auto g = cell / folds.size();
        const auto& fd = folds[cell % folds.size()];
        auto local = cfg;
        local.norm_budget = grid[g];
        const auto objective =
            members ? PenalizedObjective(fd.train, fd.train_clusters, data.unlabeled,
                                         members->unlabeled, confident, data.num_classes)
                    : PenalizedObjective::supervised(fd.train, data.num_classes);
        const auto model = fit(objective, data.dimension, local);
        acc[cell] = accuracy_on(model, fd.valid);
    });

    double best_budget = grid.front();
    double best_mean = -1.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (std::size_t f = 0; f < folds.size(); ++f) sum += acc[g * folds.size() + f];
        const double mean = sum / static_cast<double>(folds.size());
        if (mean > best_mean) {
            best_mean = mean;
            best_budget = grid[g];
        }
    }
    return best_budget;
}

}  // namespace

LinearModel fit(const Dataset& data, const Partition& partition,
                const ConfidentClusterSet& confident, const TrainConfig& cfg) {
    check_partition(data, partition, confident);
    auto members = membership(partition, data.labeled, data.unlabeled);
    const PenalizedObjective objective(data.labeled, std::move(members.labeled), data.unlabeled,
                                       std::move(members.unlabeled), confident, data.num_classes);
    return fit(objective, data.dimension, cfg);
}

LinearModel fit_supervised(const Dataset& data, const TrainConfig& cfg) {
    return fit(PenalizedObjective::supervised(data.labeled, data.num_classes), data.dimension, cfg);
}

double select_budget(const Dataset& data, const Partition& partition,
                     const ConfidentClusterSet& confident, const TrainConfig& cfg, unsigned jobs) {
    check_partition(data, partition, confident);
    const auto members = membership(partition, data.labeled, data.unlabeled);
    return select(data, &members, confident, cfg, jobs);
}

double select_budget_supervised(const Dataset& data, const TrainConfig& cfg, unsigned jobs) {
    return select(data, nullptr, {}, cfg, jobs);
}

}  // namespace pms2l
