#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mot/data/detections.hpp"
#include "mot/data/scenario.hpp"
#include "mot/sim/simnet.hpp"

namespace mot::sim {

/// One labeled similarity example: a target sample and a detection sample.
struct TrainingPair {
    geom::BoundingBox3D target_box;    // expressed in the detection frame's ego coordinates
    geom::BoundingBox3D detection_box;
    core::Tensor target_app;
    core::Tensor detection_app;
    int label = 1; // +1 same object, -1 different objects
};

struct PairGenConfig {
    double iou_positive = 0.8;        // proposal vs its ground truth
    double iou_diversity = 0.95;      // vs already accepted proposals
    int proposals_per_object = 4;     // jitter attempts per object and frame
    double jitter_pos_sigma = 0.25;   // m
    double jitter_dim_sigma = 0.05;   // relative
    double jitter_yaw_sigma = 0.05;   // rad
    double negatives_per_positive = 0.72; // targets the ~18:25 class ratio
    double appearance_sigma = 0.1;
    data::AppearanceGeometry appearance;
};

/// Jittered proposals around consecutive-frame ground truth. A proposal is a
/// positive for its own object when its footprint IoU with the ground truth
/// exceeds iou_positive; proposals too close (IoU > iou_diversity) to an
/// accepted one are rejected. Negatives pair different identities across the
/// same frame gap. Deterministic per seed.
std::vector<TrainingPair> generate_training_pairs(const data::Scenario& scenario, const PairGenConfig& cfg,
                                                  std::uint64_t seed);

/// Binary record stream: header (magic, version, count, feature geometry)
/// then per record: label (i32), target box (7 f32), detection box (7 f32),
/// target appearance blob, detection appearance blob.
void save_pairs(const std::vector<TrainingPair>& pairs, const std::string& path);
std::vector<TrainingPair> load_pairs(const std::string& path);

/// Assembles a contiguous pair batch (targets stacked before detections)
/// from dataset indices.
PairBatch make_pair_batch(const std::vector<TrainingPair>& pairs, const std::vector<int>& indices,
                          const data::AppearanceGeometry& geometry);

} // namespace mot::sim
