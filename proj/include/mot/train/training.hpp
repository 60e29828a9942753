#pragma once

#include <functional>
#include <vector>

#include "mot/assoc/assocnet.hpp"
#include "mot/core/optimizer.hpp"
#include "mot/sim/pairs.hpp"
#include "mot/sim/similarity_map.hpp"
#include "mot/sim/simnet.hpp"

namespace mot::train {

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
    double val_metric = 0.0;
    double lr = 0.0;
    std::int64_t skipped_steps = 0;
};

struct TrainResult {
    std::vector<EpochLog> log;
    double best_val = 0.0;
    int best_epoch = -1;
    int last_epoch = -1;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// ---------------------------------------------------------------------------
// SimNet
// ---------------------------------------------------------------------------

struct SimNetTrainConfig {
    core::LrSchedule schedule = core::LrSchedule::simnet_default();
    int batch_size = 128;
    int max_epochs = 80;
    int patience = 12;            // epochs without val improvement
    double target_accuracy = 0.99; // stop early once validation reaches this
};

/// Mini-batch training of the weighted cosine loss. The optimizer may come
/// from a resumed checkpoint; pass start_epoch accordingly.
TrainResult train_simnet(sim::SimNet& net, const std::vector<sim::TrainingPair>& train_set,
                         const std::vector<sim::TrainingPair>& val_set, const SimNetTrainConfig& cfg,
                         core::Rng& rng, core::Adam& opt, int start_epoch = 0,
                         const EpochCallback& on_epoch = {});

/// Fraction of pairs classified correctly at the given similarity threshold
/// (infer mode).
double pair_accuracy(sim::SimNet& net, const std::vector<sim::TrainingPair>& pairs,
                     double threshold = 0.0);

/// Estimated similarities for a pair set (infer mode).
std::vector<double> pair_scores(sim::SimNet& net, const std::vector<sim::TrainingPair>& pairs);

/// Classification operating point swept on a validation set: the threshold
/// in [-0.2, 0.9] maximizing accuracy, and that accuracy.
struct PairOperatingPoint {
    double threshold = 0.0;
    double accuracy = 0.0;
};
PairOperatingPoint sweep_pair_threshold(sim::SimNet& net, const std::vector<sim::TrainingPair>& pairs);

// ---------------------------------------------------------------------------
// AssocNet
// ---------------------------------------------------------------------------

/// Synthetic association scenes: jittered targets vs jittered detections
/// with drops and clutter, scored by a trained SimNet.
struct AssocSceneConfig {
    int targets_min = 1;
    int targets_max = 10;
    double pred_sigma = 0.3; // m, target prediction error
    data::NoiseModel noise;  // detector noise for the scene's detections
    double min_spacing = 0.0;        // m, enforced between object centers
    bool force_ambiguous = false;    // plant object pairs within 2 cells
    double ambiguous_fraction = 0.0; // chance of sampling an ambiguous scene
    sim::GridGeometry grid;
    data::AppearanceGeometry appearance;
};

struct AssocScene {
    core::Tensor input; // [S,S,n_max]
    core::Tensor masks; // [S,S,n_max]
    assoc::AssocTruth truth;
};

AssocScene sample_assoc_scene(sim::SimNet& simnet, const AssocSceneConfig& cfg, int n_max,
                              core::Rng& rng);

/// Fraction of targets whose association-map argmax hits the truth cell.
double assoc_accuracy(assoc::AssocNet& net, const std::vector<AssocScene>& scenes);

struct AssocTrainConfig {
    core::LrSchedule schedule = core::LrSchedule::assocnet_default();
    int batch_size = 8;
    int steps_per_epoch = 50;
    int max_epochs = 40;
    int patience = 8;
    double target_accuracy = 0.995;
    int val_scenes = 64;
};

TrainResult train_assocnet(assoc::AssocNet& net, sim::SimNet& simnet, const AssocSceneConfig& scene_cfg,
                           const AssocTrainConfig& cfg, core::Rng& rng, core::Adam& opt,
                           int start_epoch = 0, const EpochCallback& on_epoch = {});

// ---------------------------------------------------------------------------
// optimizer state round trip (checkpoint resume)
// ---------------------------------------------------------------------------

void save_optimizer_state(core::Checkpoint& ck, core::Adam& opt);
void load_optimizer_state(const core::Checkpoint& ck, core::Adam& opt);

} // namespace mot::train
