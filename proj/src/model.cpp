#include "pms2l/model.hpp"

#include <cmath>

#include "pms2l/error.hpp"

namespace pms2l {

LinearModel LinearModel::zeros(int num_classes, std::size_t dimension, double norm_budget,
                               double rho) {
    LinearModel m;
    m.num_classes = num_classes;
    m.dimension = dimension;
    m.weights.assign(static_cast<std::size_t>(num_classes) * dimension, 0.0);
    m.norm_budget = norm_budget;
    m.rho = rho;
    return m;
}

double LinearModel::frobenius_norm() const noexcept {
    double s = 0.0;
    for (const double w : weights) s += w * w;
    return std::sqrt(s);
}

void LinearModel::validate() const {
    if (num_classes < 2) throw ConfigError("model needs at least 2 classes");
    if (weights.size() != static_cast<std::size_t>(num_classes) * dimension) {
        throw ConfigError("weight matrix size does not match K x d");
    }
    for (const double w : weights) {
        if (!std::isfinite(w)) throw DataError("model has a non-finite weight");
    }
    if (!(norm_budget > 0.0)) throw ConfigError("norm budget must be > 0");
    if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
    if (frobenius_norm() > norm_budget + 1e-9) throw DataError("model exceeds its norm budget");
}

void score(const LinearModel& model, const Sample& x, std::span<double> scores) {
    const auto d = model.dimension;
    for (int k = 0; k < model.num_classes; ++k) {
        const double* w = model.weights.data() + static_cast<std::size_t>(k) * d;
        double s = 0.0;
        for (const auto& f : x.features) {
            if (f.index < d) s += w[f.index] * f.value;
        }
        scores[static_cast<std::size_t>(k)] = s;
    }
}

std::vector<double> score(const LinearModel& model, const Sample& x) {
    std::vector<double> out(static_cast<std::size_t>(model.num_classes));
    score(model, x, out);
    return out;
}

int argmax(std::span<const double> scores) {
    int best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    return best;
}

int predict(const LinearModel& model, const Sample& x) { return argmax(score(model, x)); }

}  // namespace pms2l
