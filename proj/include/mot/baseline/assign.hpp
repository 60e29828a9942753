#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mot::baseline {

/// Result of a one-to-one assignment: matched (row, col) pairs plus the
/// leftovers on both sides.
struct Assignment {
    std::vector<std::pair<int, int>> matches;
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
    double total_cost = 0.0;
};

/// Rectangular cost matrix with per-cell feasibility (gating).
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> cost;
    std::vector<std::uint8_t> feasible;

    CostMatrix() = default;
    CostMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), cost(static_cast<std::size_t>(r) * c, fill),
          feasible(static_cast<std::size_t>(r) * c, 1) {}

    double& at(int r, int c) { return cost[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return cost[static_cast<std::size_t>(r) * cols + c]; }
    bool is_feasible(int r, int c) const { return feasible[static_cast<std::size_t>(r) * cols + c] != 0; }
    void gate(int r, int c) { feasible[static_cast<std::size_t>(r) * cols + c] = 0; }
    void set(int r, int c, double v) { at(r, c) = v; }
};

/// Minimum-cost one-to-one assignment (Hungarian with potentials). Maximizes
/// the number of feasible matches first, then minimizes their total cost.
/// Finite costs must stay below 1e6 in magnitude.
Assignment hungarian_solve(const CostMatrix& costs);

/// Greedy baseline: repeatedly takes the globally cheapest feasible cell and
/// removes its row and column. Never beats hungarian_solve on total cost.
Assignment greedy_assign(const CostMatrix& costs);

} // namespace mot::baseline
