#pragma once

#include "mot/assoc/assocnet.hpp"
#include "mot/baseline/assign.hpp"

namespace mot::assoc {

/// Turns per-target association distributions into a one-to-one assignment.
///
/// A linear assignment is solved over cost -log(p) restricted to cells that
/// actually hold a detection, with each target's spurious cell available at
/// cost -log(p_spurious). Targets assigned to their spurious cell are missed;
/// detections claimed by no target come back as unmatched columns (candidate
/// new tracks).
///
/// probs: [N, S*S+1] rows for the real targets;
/// locals: the N crop windows (cell mapping); occupancy: the frame grid.
baseline::Assignment decode_assignments(const core::Tensor& probs,
                                        const std::vector<sim::LocalSimilarityMap>& locals,
                                        const sim::OccupancyGrid& occupancy, int num_detections);

} // namespace mot::assoc
