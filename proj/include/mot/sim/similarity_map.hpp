#pragma once

#include <vector>

#include "mot/data/detections.hpp"
#include "mot/sim/simnet.hpp"

namespace mot::sim {

struct Cell {
    int ix = -1;
    int iy = -1;

    bool valid() const { return ix >= 0 && iy >= 0; }
    bool operator==(const Cell&) const = default;
};

/// Region of interest split into square cells. Defaults to the tracking
/// region [-40,40] x [0,80] at 0.5 m, i.e. a 160x160 grid, with a local
/// crop radius of 10 cells (21x21 windows).
struct GridGeometry {
    double x_min = -40.0, x_max = 40.0;
    double y_min = 0.0, y_max = 80.0;
    double resolution = 0.5;
    int local_radius = 10;

    int cols() const { return static_cast<int>((x_max - x_min) / resolution + 0.5); }
    int rows() const { return static_cast<int>((y_max - y_min) / resolution + 0.5); }
    int local_size() const { return 2 * local_radius + 1; }

    bool contains(double x, double y) const { return x >= x_min && x < x_max && y >= y_min && y < y_max; }

    Cell cell_of(double x, double y) const {
        if (!contains(x, y)) return {};
        return {static_cast<int>((x - x_min) / resolution), static_cast<int>((y - y_min) / resolution)};
    }
};

/// One detection per cell. Collisions keep the higher detector score
/// (earlier index on ties) and are counted.
struct OccupancyGrid {
    GridGeometry geom;
    std::vector<int> det_at;     // rows*cols, detection index or -1
    std::vector<Cell> det_cells; // per detection; invalid if dropped/outside
    int collisions = 0;
    int dropped_outside = 0;

    int at(Cell c) const { return det_at[static_cast<std::size_t>(c.iy) * geom.cols() + c.ix]; }
};

OccupancyGrid build_occupancy(const GridGeometry& geom, const std::vector<data::Detection>& detections);

/// Similarity provider for one frame's targets and detections; lets the
/// baseline cost functions slot into the same map construction as the
/// learned similarity.
class PairScorer {
public:
    virtual ~PairScorer() = default;
    virtual double score(int target_idx, int det_idx) const = 0;
};

/// Eq. 2 on frozen embeddings.
class SimNetScorer : public PairScorer {
public:
    SimNetScorer(const Embeddings& targets, const Embeddings& detections)
        : targets_(targets), detections_(detections) {}
    double score(int target_idx, int det_idx) const override {
        return pair_similarity(targets_, target_idx, detections_, det_idx);
    }

private:
    const Embeddings& targets_;
    const Embeddings& detections_;
};

/// Per-target grid of similarity scores; unoccupied cells are exactly zero.
struct GlobalSimilarityMap {
    GridGeometry geom;
    std::vector<float> scores; // rows*cols, row-major by iy

    float at(Cell c) const { return scores[static_cast<std::size_t>(c.iy) * geom.cols() + c.ix]; }
};

/// Selective construction: scores computed only at occupied cells.
GlobalSimilarityMap build_global_map(const GridGeometry& geom, const OccupancyGrid& occupancy,
                                     const PairScorer& scorer, int target_idx);

/// Dense reference: materializes the zero-filled unit-feature image of the
/// grid and convolves the target features over every cell (the equivalence
/// oracle for the selective path; much slower).
GlobalSimilarityMap build_global_map_dense(const GridGeometry& geom, const OccupancyGrid& occupancy,
                                           const Embeddings& targets, const Embeddings& detections,
                                           int target_idx);

/// 21x21 crop around the target cell, zero-padded at the region border.
struct LocalSimilarityMap {
    Cell target_cell;
    Cell origin; // global cell mapped to local (0,0); may index outside the grid
    int size = 21;
    std::vector<float> scores; // size*size, row-major by local iy

    float at(int lx, int ly) const { return scores[static_cast<std::size_t>(ly) * size + lx]; }

    /// Local coordinates of a global cell, or invalid if outside the window.
    Cell to_local(Cell global) const {
        Cell l{global.ix - origin.ix, global.iy - origin.iy};
        if (l.ix < 0 || l.ix >= size || l.iy < 0 || l.iy >= size) return {};
        return l;
    }
};

LocalSimilarityMap crop_local_map(const GlobalSimilarityMap& global, Cell target_cell);

} // namespace mot::sim
