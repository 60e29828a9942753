#include "mot/sim/similarity_map.hpp"

#include <stdexcept>

#include "mot/core/kernels.hpp"

namespace mot::sim {

OccupancyGrid build_occupancy(const GridGeometry& geom, const std::vector<data::Detection>& detections) {
    OccupancyGrid grid;
    grid.geom = geom;
    grid.det_at.assign(static_cast<std::size_t>(geom.rows()) * geom.cols(), -1);
    grid.det_cells.resize(detections.size());
    for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
        const auto& d = detections[static_cast<std::size_t>(j)];
        const Cell c = geom.cell_of(d.box.cx, d.box.cy);
        if (!c.valid()) {
            ++grid.dropped_outside;
            continue;
        }
        const std::size_t at = static_cast<std::size_t>(c.iy) * geom.cols() + c.ix;
        const int prev = grid.det_at[at];
        if (prev < 0) {
            grid.det_at[at] = j;
            grid.det_cells[static_cast<std::size_t>(j)] = c;
        } else {
            // keep the higher detector score; earlier index wins ties
            ++grid.collisions;
            if (detections[static_cast<std::size_t>(j)].score > detections[static_cast<std::size_t>(prev)].score) {
                grid.det_at[at] = j;
                grid.det_cells[static_cast<std::size_t>(j)] = c;
                grid.det_cells[static_cast<std::size_t>(prev)] = {};
            }
        }
    }
    return grid;
}

GlobalSimilarityMap build_global_map(const GridGeometry& geom, const OccupancyGrid& occupancy,
                                     const PairScorer& scorer, int target_idx) {
    GlobalSimilarityMap map;
    map.geom = geom;
    map.scores.assign(static_cast<std::size_t>(geom.rows()) * geom.cols(), 0.f);
    for (int j = 0; j < static_cast<int>(occupancy.det_cells.size()); ++j) {
        const Cell c = occupancy.det_cells[static_cast<std::size_t>(j)];
        if (!c.valid()) continue;
        map.scores[static_cast<std::size_t>(c.iy) * geom.cols() + c.ix] =
            static_cast<float>(scorer.score(target_idx, j));
    }
    return map;
}

GlobalSimilarityMap build_global_map_dense(const GridGeometry& geom, const OccupancyGrid& occupancy,
                                           const Embeddings& targets, const Embeddings& detections,
                                           int target_idx) {
    const int rows = geom.rows(), cols = geom.cols();
    const std::size_t f = static_cast<std::size_t>(targets.bbox_feat.shape[1]);

    // zero-filled unit-feature images of the whole grid
    std::vector<float> bbox_img(static_cast<std::size_t>(rows) * cols * f, 0.f);
    std::vector<float> app_img(static_cast<std::size_t>(rows) * cols * f, 0.f);
    for (int j = 0; j < static_cast<int>(occupancy.det_cells.size()); ++j) {
        const Cell c = occupancy.det_cells[static_cast<std::size_t>(j)];
        if (!c.valid()) continue;
        const std::size_t at = (static_cast<std::size_t>(c.iy) * cols + c.ix) * f;
        std::copy_n(detections.bbox_feat.data() + j * f, f, bbox_img.begin() + static_cast<std::ptrdiff_t>(at));
        std::copy_n(detections.app_feat.data() + j * f, f, app_img.begin() + static_cast<std::ptrdiff_t>(at));
    }

    // 1x1 convolution of the target features over every cell
    GlobalSimilarityMap map;
    map.geom = geom;
    map.scores.assign(static_cast<std::size_t>(rows) * cols, 0.f);
    const float* tb = targets.bbox_feat.data() + target_idx * f;
    const float* ta = targets.app_feat.data() + target_idx * f;
    for (std::size_t cell = 0; cell < map.scores.size(); ++cell) {
        const float cos_bbox = kern::dot(tb, bbox_img.data() + cell * f, f);
        const float cos_app = kern::dot(ta, app_img.data() + cell * f, f);
        const int j = occupancy.det_at[cell];
        if (j < 0) {
            map.scores[cell] = cos_bbox + cos_app; // both zero at empty cells
        } else {
            const PairWeights w = pair_weights(targets, target_idx, detections, j);
            map.scores[cell] = static_cast<float>(w.bbox * cos_bbox + w.appear * cos_app);
        }
    }
    return map;
}

LocalSimilarityMap crop_local_map(const GlobalSimilarityMap& global, Cell target_cell) {
    const GridGeometry& geom = global.geom;
    if (!target_cell.valid() || target_cell.ix >= geom.cols() || target_cell.iy >= geom.rows()) {
        throw std::invalid_argument("crop_local_map: target cell outside grid");
    }
    LocalSimilarityMap local;
    local.target_cell = target_cell;
    local.size = geom.local_size();
    local.origin = {target_cell.ix - geom.local_radius, target_cell.iy - geom.local_radius};
    local.scores.assign(static_cast<std::size_t>(local.size) * local.size, 0.f);
    for (int ly = 0; ly < local.size; ++ly) {
        const int gy = local.origin.iy + ly;
        if (gy < 0 || gy >= geom.rows()) continue;
        for (int lx = 0; lx < local.size; ++lx) {
            const int gx = local.origin.ix + lx;
            if (gx < 0 || gx >= geom.cols()) continue;
            local.scores[static_cast<std::size_t>(ly) * local.size + lx] =
                global.scores[static_cast<std::size_t>(gy) * geom.cols() + gx];
        }
    }
    return local;
}

} // namespace mot::sim
