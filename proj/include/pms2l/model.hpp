#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pms2l/data.hpp"

namespace pms2l {

/// Linear multiclass scorer h(x, y) = <w_y, x> with ||W||_F <= norm_budget.
struct LinearModel {
    int num_classes = 0;
    std::size_t dimension = 0;
    std::vector<double> weights;  // row-major K x d
    double norm_budget = 1.0;
    double rho = 1.0;

    static LinearModel zeros(int num_classes, std::size_t dimension, double norm_budget, double rho);

    std::span<double> row(int k) {
        return {weights.data() + static_cast<std::size_t>(k) * dimension, dimension};
    }
    std::span<const double> row(int k) const {
        return {weights.data() + static_cast<std::size_t>(k) * dimension, dimension};
    }
    double frobenius_norm() const noexcept;
    void validate() const;
};

/// scores[y] = <w_y, x>; coordinates of x beyond the model dimension contribute 0.
void score(const LinearModel& model, const Sample& x, std::span<double> scores);
std::vector<double> score(const LinearModel& model, const Sample& x);

/// Argmax of the scores; ties go to the lowest class index.
int argmax(std::span<const double> scores);
int predict(const LinearModel& model, const Sample& x);

}  // namespace pms2l
