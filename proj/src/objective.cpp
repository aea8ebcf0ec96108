#include "pms2l/objective.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pms2l/error.hpp"

namespace pms2l {

namespace {

// Best class other than y; ties go to the lowest index.
int runner_up(std::span<const double> scores, int y) {
    int best = -1;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (static_cast<int>(k) == y) continue;
        if (best < 0 || scores[k] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    return best;
}

// Best class with mask[k] == want; ties go to the lowest index.
int best_where(std::span<const double> scores, const std::vector<char>& mask, char want) {
    int best = -1;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (mask[k] != want) continue;
        if (best < 0 || scores[k] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    return best;
}

std::vector<char> kappa_mask(std::span<const int> predominant, std::size_t K) {
    if (predominant.empty()) throw ArgumentError("predominant class set is empty");
    std::vector<char> mask(K, 0);
    for (const int y : predominant) {
        if (y < 0 || static_cast<std::size_t>(y) >= K) {
            throw ArgumentError("predominant class " + std::to_string(y) + " out of range");
        }
        mask[static_cast<std::size_t>(y)] = 1;
    }
    if (std::count(mask.begin(), mask.end(), 1) == static_cast<std::ptrdiff_t>(K)) {
        throw ArgumentError("predominant class set covers every class");
    }
    return mask;
}

bool active(double m, double rho) { return m >= 0.0 && m <= rho; }

void add_scaled(std::vector<double>& grad, std::size_t d, int row, const Sample& x, double scale) {
    double* g = grad.data() + static_cast<std::size_t>(row) * d;
    for (const auto& f : x.features) {
        if (f.index < d) g[f.index] += scale * f.value;
    }
}

}  // namespace

double margin(std::span<const double> scores, int y) {
    if (scores.size() < 2) throw ArgumentError("margin needs at least 2 classes");
    if (y < 0 || static_cast<std::size_t>(y) >= scores.size()) {
        throw ArgumentError("class index out of range");
    }
    return scores[static_cast<std::size_t>(y)] - scores[static_cast<std::size_t>(runner_up(scores, y))];
}

double unlabeled_margin(std::span<const double> scores, std::span<const int> predominant) {
    const auto mask = kappa_mask(predominant, scores.size());
    const int inside = best_where(scores, mask, 1);
    const int outside = best_where(scores, mask, 0);
    return scores[static_cast<std::size_t>(inside)] - scores[static_cast<std::size_t>(outside)];
}

double phi_rho(double z, double rho) {
    if (!(rho > 0.0)) throw ArgumentError("rho must be > 0");
    if (z >= rho) return 0.0;
    if (z <= 0.0) return 1.0;
    return 1.0 - z / rho;
}

PenalizedObjective::PenalizedObjective(std::span<const Sample> labeled,
                                       std::vector<int> labeled_clusters,
                                       std::span<const Sample> unlabeled,
                                       std::vector<int> unlabeled_clusters,
                                       ConfidentClusterSet confident, int num_classes)
    : labeled_(labeled),
      unlabeled_(unlabeled),
      labeled_cluster_(std::move(labeled_clusters)),
      confident_(std::move(confident)),
      num_classes_(num_classes) {
    if (labeled_.empty()) throw ArgumentError("penalized risk needs a nonempty labeled set");
    if (num_classes_ < 2) throw ConfigError("need at least 2 classes");
    if (labeled_cluster_.size() != labeled_.size()) {
        throw ConfigError("labeled cluster ids do not match the labeled set");
    }
    if (!confident_.empty() && unlabeled_clusters.size() != unlabeled_.size()) {
        throw ConfigError("unlabeled cluster ids do not match the unlabeled set");
    }
    for (std::size_t i = 0; i < labeled_.size(); ++i) {
        const auto& y = labeled_[i].label;
        if (!y || *y < 0 || *y >= num_classes_) {
            throw DataError("labeled sample " + std::to_string(i) + " has no valid label");
        }
        dimension_ = std::max(dimension_, labeled_[i].extent());
    }
    const auto K = static_cast<std::size_t>(num_classes_);
    for (const auto& c : confident_.clusters) in_kappa_.push_back(kappa_mask(c.predominant, K));
    if (!confident_.empty()) {
        std::vector<int> slot_of(static_cast<std::size_t>(confident_.num_clusters), -1);
        for (std::size_t s = 0; s < confident_.clusters.size(); ++s) {
            slot_of[static_cast<std::size_t>(confident_.clusters[s].cluster_id)] = static_cast<int>(s);
        }
        for (std::size_t i = 0; i < unlabeled_.size(); ++i) {
            const int g = unlabeled_clusters[i];
            if (g < 0 || g >= confident_.num_clusters) throw ConfigError("unlabeled cluster id out of range");
            if (slot_of[static_cast<std::size_t>(g)] >= 0) {
                penalized_.push_back({i, static_cast<std::size_t>(slot_of[static_cast<std::size_t>(g)])});
            }
            dimension_ = std::max(dimension_, unlabeled_[i].extent());
        }
    }
}

PenalizedObjective PenalizedObjective::supervised(std::span<const Sample> labeled, int num_classes) {
    return PenalizedObjective(labeled, std::vector<int>(labeled.size(), -1), {}, {}, {}, num_classes);
}

RiskBreakdown PenalizedObjective::risk(const LinearModel& model, double rho) const {
    if (!(rho > 0.0)) throw ArgumentError("rho must be > 0");
    if (model.num_classes != num_classes_) throw ConfigError("model class count mismatch");
    RiskBreakdown out;
    std::vector<double> scores(static_cast<std::size_t>(num_classes_));
    const double nn = static_cast<double>(n());
    const double nu = static_cast<double>(u());

    for (const auto& c : confident_.clusters) out.per_cluster[c.cluster_id] = {};

    double labeled_sum = 0.0;
    double outside_sum = 0.0;
    for (std::size_t i = 0; i < labeled_.size(); ++i) {
        score(model, labeled_[i], scores);
        const double loss = phi_rho(margin(scores, *labeled_[i].label), rho);
        labeled_sum += loss;
        const auto it = out.per_cluster.find(labeled_cluster_[i]);
        if (it != out.per_cluster.end()) {
            it->second.labeled_part += loss;
        } else {
            outside_sum += loss;
        }
    }
    double penalty_sum = 0.0;
    for (const auto& p : penalized_) {
        score(model, unlabeled_[p.sample], scores);
        const auto& mask = in_kappa_[p.slot];
        const int inside = best_where(scores, mask, 1);
        const int outside = best_where(scores, mask, 0);
        const double loss = phi_rho(scores[static_cast<std::size_t>(inside)] -
                                        scores[static_cast<std::size_t>(outside)],
                                    rho);
        penalty_sum += loss;
        out.per_cluster[confident_.clusters[p.slot].cluster_id].unlabeled_part += loss;
    }

    // Same operation order as evaluate(), so both report bit-identical totals.
    out.labeled_term = labeled_sum / nn;
    out.penalty_term = penalized_.empty() ? 0.0 : penalty_sum / nu;
    out.total = out.labeled_term + out.penalty_term;
    out.labeled_outside = outside_sum / nn;
    for (auto& [id, cr] : out.per_cluster) {
        cr.labeled_part /= nn;
        cr.unlabeled_part = penalized_.empty() ? 0.0 : cr.unlabeled_part / nu;
        cr.total = cr.labeled_part + cr.unlabeled_part;
    }
    return out;
}

double PenalizedObjective::evaluate(const LinearModel& model, double rho,
                                    std::vector<double>* grad) const {
    if (!(rho > 0.0)) throw ArgumentError("rho must be > 0");
    if (model.num_classes != num_classes_) throw ConfigError("model class count mismatch");
    const auto d = model.dimension;
    if (grad) grad->assign(model.weights.size(), 0.0);
    std::vector<double> scores(static_cast<std::size_t>(num_classes_));

    const double labeled_scale = 1.0 / (static_cast<double>(n()) * rho);
    double labeled_sum = 0.0;
    for (const auto& x : labeled_) {
        score(model, x, scores);
        const int y = *x.label;
        const int rival = runner_up(scores, y);
        const double m = scores[static_cast<std::size_t>(y)] - scores[static_cast<std::size_t>(rival)];
        labeled_sum += phi_rho(m, rho);
        if (grad && active(m, rho)) {
            add_scaled(*grad, d, rival, x, labeled_scale);
            add_scaled(*grad, d, y, x, -labeled_scale);
        }
    }

    double penalty_sum = 0.0;
    if (!penalized_.empty()) {
        const double unlabeled_scale = 1.0 / (static_cast<double>(u()) * rho);
        for (const auto& p : penalized_) {
            const auto& x = unlabeled_[p.sample];
            score(model, x, scores);
            const auto& mask = in_kappa_[p.slot];
            const int inside = best_where(scores, mask, 1);
            const int outside = best_where(scores, mask, 0);
            const double m = scores[static_cast<std::size_t>(inside)] - scores[static_cast<std::size_t>(outside)];
            penalty_sum += phi_rho(m, rho);
            if (grad && active(m, rho)) {
                add_scaled(*grad, d, outside, x, unlabeled_scale);
                add_scaled(*grad, d, inside, x, -unlabeled_scale);
            }
        }
        penalty_sum /= static_cast<double>(u());
    }
    return labeled_sum / static_cast<double>(n()) + penalty_sum;
}

namespace {

PenalizedObjective build(std::span<const Sample> labeled, std::span<const Sample> unlabeled,
                         const Partition& partition, const ConfidentClusterSet& confident,
                         int num_classes) {
    auto m = membership(partition, labeled, unlabeled);
    return PenalizedObjective(labeled, std::move(m.labeled), unlabeled, std::move(m.unlabeled),
                              confident, num_classes);
}

}  // namespace

RiskBreakdown penalized_risk(const LinearModel& model, std::span<const Sample> labeled,
                             std::span<const Sample> unlabeled, const Partition& partition,
                             const ConfidentClusterSet& confident, double rho) {
    return build(labeled, unlabeled, partition, confident, model.num_classes).risk(model, rho);
}

std::vector<double> subgradient(const LinearModel& model, std::span<const Sample> labeled,
                                std::span<const Sample> unlabeled, const Partition& partition,
                                const ConfidentClusterSet& confident, double rho) {
    std::vector<double> grad;
    build(labeled, unlabeled, partition, confident, model.num_classes).evaluate(model, rho, &grad);
    return grad;
}

}  // namespace pms2l
