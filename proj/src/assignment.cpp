#include "pms2l/assignment.hpp"

#include <limits>

namespace pms2l {

std::vector<int> solve_min_assignment(const IntMatrix& cost) {
    const int n = cost.size;
    if (n == 0) return {};
    constexpr auto inf = std::numeric_limits<std::int64_t>::max() / 4;
    // 1-based arrays; column 0 is the virtual source of each augmenting path.
    std::vector<std::int64_t> row_pot(n + 1, 0), col_pot(n + 1, 0);
    std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
    for (int r = 1; r <= n; ++r) {
        row_of_col[0] = r;
        int col = 0;
        std::vector<std::int64_t> min_slack(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[col] = 1;
            const int row = row_of_col[col];
            std::int64_t delta = inf;
            int next = 0;
            for (int c = 1; c <= n; ++c) {
                if (used[c]) continue;
                const std::int64_t slack = cost(row - 1, c - 1) - row_pot[row] - col_pot[c];
                if (slack < min_slack[c]) {
                    min_slack[c] = slack;
                    way[c] = col;
                }
                if (min_slack[c] < delta) {
                    delta = min_slack[c];
                    next = c;
                }
            }
            for (int c = 0; c <= n; ++c) {
                if (used[c]) {
                    row_pot[row_of_col[c]] += delta;
                    col_pot[c] -= delta;
                } else {
                    min_slack[c] -= delta;
                }
            }
            col = next;
        } while (row_of_col[col] != 0);
        do {
            const int prev = way[col];
            row_of_col[col] = row_of_col[prev];
            col = prev;
        } while (col != 0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int c = 1; c <= n; ++c) col_of_row[row_of_col[c] - 1] = c - 1;
    return col_of_row;
}

std::int64_t max_assignment_weight(const IntMatrix& weight) {
    IntMatrix cost(weight.size);
    for (std::size_t i = 0; i < cost.values.size(); ++i) cost.values[i] = -weight.values[i];
    const auto perm = solve_min_assignment(cost);
    std::int64_t total = 0;
    for (int r = 0; r < weight.size; ++r) total += weight(r, perm[r]);
    return total;
}

}  // namespace pms2l
