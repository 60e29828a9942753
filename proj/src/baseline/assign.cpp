#include "mot/baseline/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mot::baseline {

namespace {

constexpr double kBig = 1e9;      // stand-in cost for gated cells
constexpr double kMaxCost = 1e6;  // documented bound on finite costs

// Shortest-augmenting-path Hungarian on a padded row-major matrix,
// 1-indexed, requires n <= m. Returns p where p[j] = row assigned to col j.
std::vector<int> solve_padded(const std::vector<double>& a, int n, int m) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = a[static_cast<std::size_t>(i0) * (m + 1) + j] - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    return p;
}

void finalize(Assignment& out, const CostMatrix& costs, std::vector<int>& row_of_col) {
    std::vector<char> row_used(static_cast<std::size_t>(costs.rows), 0);
    std::vector<char> col_used(static_cast<std::size_t>(costs.cols), 0);
    for (int c = 0; c < costs.cols; ++c) {
        const int r = row_of_col[static_cast<std::size_t>(c)];
        if (r < 0 || !costs.is_feasible(r, c)) continue;
        out.matches.emplace_back(r, c);
        row_used[static_cast<std::size_t>(r)] = 1;
        col_used[static_cast<std::size_t>(c)] = 1;
    }
    std::sort(out.matches.begin(), out.matches.end());
    out.total_cost = 0.0;
    for (const auto& [r, c] : out.matches) out.total_cost += costs.at(r, c);
    for (int r = 0; r < costs.rows; ++r) {
        if (!row_used[static_cast<std::size_t>(r)]) out.unmatched_rows.push_back(r);
    }
    for (int c = 0; c < costs.cols; ++c) {
        if (!col_used[static_cast<std::size_t>(c)]) out.unmatched_cols.push_back(c);
    }
}

} // namespace

Assignment hungarian_solve(const CostMatrix& costs) {
    Assignment out;
    if (costs.rows == 0 || costs.cols == 0) {
        for (int r = 0; r < costs.rows; ++r) out.unmatched_rows.push_back(r);
        for (int c = 0; c < costs.cols; ++c) out.unmatched_cols.push_back(c);
        return out;
    }
    for (std::size_t i = 0; i < costs.cost.size(); ++i) {
        if (costs.feasible[i] && (!std::isfinite(costs.cost[i]) || std::abs(costs.cost[i]) >= kMaxCost)) {
            throw std::invalid_argument("hungarian_solve: feasible costs must be finite and < 1e6");
        }
    }

    const bool transposed = costs.rows > costs.cols;
    const int n = transposed ? costs.cols : costs.rows;
    const int m = transposed ? costs.rows : costs.cols;
    std::vector<double> a(static_cast<std::size_t>(n + 1) * (m + 1), 0.0);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= m; ++j) {
            const int r = transposed ? j - 1 : i - 1;
            const int c = transposed ? i - 1 : j - 1;
            a[static_cast<std::size_t>(i) * (m + 1) + j] = costs.is_feasible(r, c) ? costs.at(r, c) : kBig;
        }
    }
    const std::vector<int> p = solve_padded(a, n, m);

    std::vector<int> row_of_col(static_cast<std::size_t>(costs.cols), -1);
    for (int j = 1; j <= m; ++j) {
        const int i = p[static_cast<std::size_t>(j)];
        if (i == 0) continue;
        const int r = transposed ? j - 1 : i - 1;
        const int c = transposed ? i - 1 : j - 1;
        row_of_col[static_cast<std::size_t>(c)] = r;
    }
    finalize(out, costs, row_of_col);
    return out;
}

Assignment greedy_assign(const CostMatrix& costs) {
    Assignment out;
    std::vector<char> row_done(static_cast<std::size_t>(costs.rows), 0);
    std::vector<char> col_done(static_cast<std::size_t>(costs.cols), 0);
    std::vector<int> row_of_col(static_cast<std::size_t>(costs.cols), -1);
    while (true) {
        int best_r = -1, best_c = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < costs.rows; ++r) {
            if (row_done[static_cast<std::size_t>(r)]) continue;
            for (int c = 0; c < costs.cols; ++c) {
                if (col_done[static_cast<std::size_t>(c)] || !costs.is_feasible(r, c)) continue;
                if (costs.at(r, c) < best) {
                    best = costs.at(r, c);
                    best_r = r;
                    best_c = c;
                }
            }
        }
        if (best_r < 0) break;
        row_done[static_cast<std::size_t>(best_r)] = 1;
        col_done[static_cast<std::size_t>(best_c)] = 1;
        row_of_col[static_cast<std::size_t>(best_c)] = best_r;
    }
    finalize(out, costs, row_of_col);
    return out;
}

} // namespace mot::baseline
