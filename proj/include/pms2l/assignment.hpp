#pragma once

#include <cstdint>
#include <vector>

namespace pms2l {

/// Square integer matrix, row-major.
struct IntMatrix {
    int size = 0;
    std::vector<std::int64_t> values;

    IntMatrix() = default;
    explicit IntMatrix(int n) : size(n), values(static_cast<std::size_t>(n) * n, 0) {}
    std::int64_t& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * size + c]; }
    std::int64_t operator()(int r, int c) const {
        return values[static_cast<std::size_t>(r) * size + c];
    }
};

/// Hungarian algorithm (shortest augmenting paths with potentials), O(n^3).
/// Returns col_of_row minimizing sum cost(r, col_of_row[r]). Exact on integers.
std::vector<int> solve_min_assignment(const IntMatrix& cost);

/// Maximum of sum weight(r, pi(r)) over permutations pi.
std::int64_t max_assignment_weight(const IntMatrix& weight);

}  // namespace pms2l
