#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mot/assoc/assocnet.hpp"
#include "mot/baseline/assign.hpp"
#include "mot/baseline/costs.hpp"
#include "mot/data/detections.hpp"
#include "mot/sim/similarity_map.hpp"
#include "mot/sim/simnet.hpp"
#include "mot/track/existence.hpp"
#include "mot/track/kalman.hpp"

namespace mot::track {

/// Persistent tracked object. Kalman state lives in the world frame; dims
/// and yaw are blended outside the filter.
struct Track {
    int id = -1;
    KalmanState kf;
    double l = 1, w = 1, h = 1;
    double yaw = 0;
    core::Tensor appearance; // latest matched observation
    double existence = 0.5;
    int age = 0;
    int consecutive_misses = 0;
    int source_id = -1; // identity of the spawning detection; simulation bookkeeping

    geom::BoundingBox3D box() const {
        return {kf.x[0], kf.x[1], kf.x[2], l, w, h, yaw};
    }
};

struct TrackerConfig {
    KalmanConfig kalman;
    ExistenceConfig existence;
    double ema_alpha = 0.5; // weight of the new observation for dims/yaw
    sim::GridGeometry grid;
    double gate = 5.0; // m, parity with the local-map radius
    int histogram_bins = 32;
};

enum class CostModel { simnet, euclidean, manhattan, bhattacharyya, chisquare };
enum class AssociationMethod { assocnet, hungarian, greedy };

/// Everything an associator sees for one frame: predicted targets and the
/// frame's detections, both in the current ego frame.
struct AssocContext {
    std::vector<geom::BoundingBox3D> track_boxes;
    std::vector<const core::Tensor*> track_appearances;
    std::vector<int> track_source_ids; // simulation bookkeeping, oracle only
    const std::vector<data::Detection>* detections = nullptr;
};

class Associator {
public:
    virtual ~Associator() = default;
    /// Rows are track indices, columns detection indices.
    virtual baseline::Assignment associate(const AssocContext& ctx) = 0;
};

/// Builds per-pair similarity in [-1, 1] for the configured cost model;
/// SimNet uses the learned Eq. 2 score, the baselines map their distances
/// through fixed monotone transforms.
class FrameScorer : public sim::PairScorer {
public:
    FrameScorer(CostModel model, sim::SimNet* net, const AssocContext& ctx, const TrackerConfig& cfg);
    double score(int target_idx, int det_idx) const override;

private:
    CostModel model_;
    const AssocContext& ctx_;
    double gate_;
    sim::Embeddings targets_;
    sim::Embeddings detections_;
    std::vector<std::vector<double>> track_hist_;
    std::vector<std::vector<double>> det_hist_;

    friend class AssocNetAssociator;
};

/// Classical pipeline: gated cost matrix, Hungarian or greedy solver.
class CostAssociator : public Associator {
public:
    CostAssociator(CostModel model, AssociationMethod method, sim::SimNet* net, TrackerConfig cfg);
    baseline::Assignment associate(const AssocContext& ctx) override;

private:
    CostModel model_;
    AssociationMethod method_;
    sim::SimNet* net_;
    TrackerConfig cfg_;
};

/// Learned pipeline: similarity maps -> AssocNet -> assignment decoding.
class AssocNetAssociator : public Associator {
public:
    AssocNetAssociator(CostModel model, sim::SimNet* simnet, assoc::AssocNet* assocnet, TrackerConfig cfg);
    baseline::Assignment associate(const AssocContext& ctx) override;

    /// Observer for association-map dumps: (probs [N,S*S+1], n).
    std::function<void(const core::Tensor&, int)> map_observer;

private:
    CostModel model_;
    sim::SimNet* simnet_;
    assoc::AssocNet* assocnet_;
    TrackerConfig cfg_;
};

/// Matches by simulated source identity; an upper-bound reference, not a
/// production associator.
class OracleAssociator : public Associator {
public:
    baseline::Assignment associate(const AssocContext& ctx) override;
};

struct StepStats {
    int frame = 0;
    int detections = 0;
    int matched = 0;
    int missed = 0;
    int births = 0;
    int deaths = 0;
    double latency_ms = 0.0;
};

struct TrackerCounters {
    std::int64_t births = 0;
    std::int64_t deaths = 0;
    std::int64_t misses = 0;
    std::int64_t frames = 0;
};

/// Single-owner online track manager: predict, associate, update, initiate,
/// prune. Detections arrive in the ego frame together with the ego pose.
class Tracker {
public:
    Tracker(TrackerConfig cfg, std::unique_ptr<Associator> associator);

    StepStats step(const std::vector<data::Detection>& detections, const geom::Pose& ego, double dt);

    const std::vector<Track>& tracks() const { return tracks_; }
    /// Tracks above the report threshold.
    std::vector<const Track*> reported() const;
    const TrackerCounters& counters() const { return counters_; }

private:
    TrackerConfig cfg_;
    std::unique_ptr<Associator> associator_;
    std::vector<Track> tracks_;
    TrackerCounters counters_;
    int next_id_ = 0;
    int frame_idx_ = 0;
};

} // namespace mot::track
