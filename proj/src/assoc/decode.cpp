#include "mot/assoc/decode.hpp"

#include <algorithm>
#include <cmath>

namespace mot::assoc {

baseline::Assignment decode_assignments(const core::Tensor& probs,
                                        const std::vector<sim::LocalSimilarityMap>& locals,
                                        const sim::OccupancyGrid& occupancy, int num_detections) {
    core::require_rank(probs, 2, "decode_assignments probs");
    const int n = static_cast<int>(locals.size());
    if (probs.shape[0] < n) throw std::invalid_argument("decode_assignments: fewer prob rows than targets");
    const int width = probs.shape[1];
    const int spurious = width - 1;
    const int s = n > 0 ? locals[0].size : 0;

    constexpr double p_min = 1e-12;
    // columns: detections, then one private spurious column per target
    baseline::CostMatrix costs(n, num_detections + n);
    for (auto& f : costs.feasible) f = 0;
    for (int t = 0; t < n; ++t) {
        for (int j = 0; j < num_detections; ++j) {
            const sim::Cell cell = occupancy.det_cells[static_cast<std::size_t>(j)];
            if (!cell.valid()) continue; // outside region or lost a cell collision
            const sim::Cell local = locals[static_cast<std::size_t>(t)].to_local(cell);
            if (!local.valid()) continue;
            const int flat = local.iy * s + local.ix;
            const double p = std::max(static_cast<double>(probs.at2(t, flat)), p_min);
            costs.set(t, j, -std::log(p));
            costs.feasible[static_cast<std::size_t>(t) * costs.cols + j] = 1;
        }
        const double p_spur = std::max(static_cast<double>(probs.at2(t, spurious)), p_min);
        costs.set(t, num_detections + t, -std::log(p_spur));
        costs.feasible[static_cast<std::size_t>(t) * costs.cols + num_detections + t] = 1;
    }

    const baseline::Assignment raw = baseline::hungarian_solve(costs);

    baseline::Assignment out;
    std::vector<char> det_used(static_cast<std::size_t>(num_detections), 0);
    std::vector<char> track_seen(static_cast<std::size_t>(n), 0);
    for (const auto& [t, c] : raw.matches) {
        track_seen[static_cast<std::size_t>(t)] = 1;
        if (c < num_detections) {
            out.matches.emplace_back(t, c);
            det_used[static_cast<std::size_t>(c)] = 1;
            out.total_cost += costs.at(t, c);
        } else {
            out.unmatched_rows.push_back(t); // matched its spurious cell: missed
        }
    }
    for (int t = 0; t < n; ++t) {
        if (!track_seen[static_cast<std::size_t>(t)]) out.unmatched_rows.push_back(t);
    }
    std::sort(out.unmatched_rows.begin(), out.unmatched_rows.end());
    for (int j = 0; j < num_detections; ++j) {
        if (!det_used[static_cast<std::size_t>(j)]) out.unmatched_cols.push_back(j);
    }
    return out;
}

} // namespace mot::assoc
