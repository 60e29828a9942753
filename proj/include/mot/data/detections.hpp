#pragma once

#include <cstdint>
#include <vector>

#include "mot/core/rng.hpp"
#include "mot/core/tensor.hpp"
#include "mot/data/scenario.hpp"
#include "mot/geom.hpp"

namespace mot::data {

struct AppearanceGeometry {
    int h = 7, w = 7, c = 32;

    std::vector<int> shape() const { return {h, w, c}; }
    std::int64_t numel() const { return static_cast<std::int64_t>(h) * w * c; }
};

/// Per-frame observation: box in ego coordinates plus an appearance tensor.
/// source_id is simulation bookkeeping (-1 for clutter); real detectors do
/// not provide it and nothing in the tracking path may depend on it.
struct Detection {
    geom::BoundingBox3D box;
    core::Tensor appearance;
    double score = 1.0;
    int source_id = -1;
};

struct NoiseModel {
    double pos_sigma = 0.0;        // m per horizontal axis
    double dim_sigma = 0.0;        // relative
    double yaw_sigma = 0.0;        // rad
    double fn_rate = 0.0;          // per-object drop probability
    double fp_rate = 0.0;          // expected clutter detections per frame
    double appearance_sigma = 0.0; // noise on the synthetic appearance
    Region clutter_region;         // where clutter spawns
};

/// Identity-anchored synthetic appearance: a hash-seeded base tensor per
/// object id plus per-observation Gaussian noise. Stands in for detector
/// image features at desk scale.
core::Tensor synth_appearance(int object_id, double noise, core::Rng& rng,
                              const AppearanceGeometry& geometry = {});

/// Simulated detector output for every frame of a scenario: jittered true
/// boxes (in ego coordinates) minus dropped ones plus clutter. Detections
/// never land outside the clutter region.
std::vector<std::vector<Detection>> simulate_detections(const Scenario& scenario, const NoiseModel& noise,
                                                        std::uint64_t seed,
                                                        const AppearanceGeometry& geometry = {});

} // namespace mot::data
