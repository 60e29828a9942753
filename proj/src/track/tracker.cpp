#include "mot/track/tracker.hpp"

#include <chrono>
#include <cmath>

#include "mot/assoc/decode.hpp"

namespace mot::track {

namespace {

std::vector<geom::BoundingBox3D> detection_boxes(const std::vector<data::Detection>& dets) {
    std::vector<geom::BoundingBox3D> out;
    out.reserve(dets.size());
    for (const auto& d : dets) out.push_back(d.box);
    return out;
}

std::vector<core::Tensor> detection_apps(const std::vector<data::Detection>& dets) {
    std::vector<core::Tensor> out;
    out.reserve(dets.size());
    for (const auto& d : dets) out.push_back(d.appearance);
    return out;
}

} // namespace

FrameScorer::FrameScorer(CostModel model, sim::SimNet* net, const AssocContext& ctx,
                         const TrackerConfig& cfg)
    : model_(model), ctx_(ctx), gate_(cfg.gate) {
    const auto& dets = *ctx.detections;
    if (model_ == CostModel::simnet) {
        if (!net) throw std::invalid_argument("FrameScorer: simnet cost requires a SimNet");
        std::vector<core::Tensor> track_apps;
        track_apps.reserve(ctx.track_appearances.size());
        for (const auto* a : ctx.track_appearances) track_apps.push_back(*a);
        targets_ = sim::embed_objects(*net, ctx.track_boxes, track_apps);
        detections_ = sim::embed_objects(*net, detection_boxes(dets), detection_apps(dets));
    } else if (model_ == CostModel::bhattacharyya || model_ == CostModel::chisquare) {
        std::vector<const core::Tensor*> all;
        for (const auto* a : ctx.track_appearances) all.push_back(a);
        for (const auto& d : dets) all.push_back(&d.appearance);
        const auto [lo, hi] = baseline::appearance_value_range(all);
        for (const auto* a : ctx.track_appearances) {
            track_hist_.push_back(baseline::appearance_histogram(*a, lo, hi, cfg.histogram_bins));
        }
        for (const auto& d : dets) {
            det_hist_.push_back(baseline::appearance_histogram(d.appearance, lo, hi, cfg.histogram_bins));
        }
    }
}

double FrameScorer::score(int target_idx, int det_idx) const {
    const auto& dets = *ctx_.detections;
    switch (model_) {
    case CostModel::simnet:
        return sim::pair_similarity(targets_, target_idx, detections_, det_idx);
    case CostModel::euclidean: {
        const double d = baseline::position_cost(ctx_.track_boxes[static_cast<std::size_t>(target_idx)],
                                                 dets[static_cast<std::size_t>(det_idx)].box,
                                                 baseline::PositionMetric::euclidean);
        return 1.0 - 2.0 * std::min(d, gate_) / gate_;
    }
    case CostModel::manhattan: {
        const double d = baseline::position_cost(ctx_.track_boxes[static_cast<std::size_t>(target_idx)],
                                                 dets[static_cast<std::size_t>(det_idx)].box,
                                                 baseline::PositionMetric::manhattan);
        return 1.0 - 2.0 * std::min(d, gate_) / gate_;
    }
    case CostModel::bhattacharyya: {
        const double bc = baseline::histogram_cost(track_hist_[static_cast<std::size_t>(target_idx)],
                                                   det_hist_[static_cast<std::size_t>(det_idx)],
                                                   baseline::HistogramMetric::bhattacharyya);
        return 2.0 * std::exp(-bc) - 1.0;
    }
    case CostModel::chisquare: {
        const double chi = baseline::histogram_cost(track_hist_[static_cast<std::size_t>(target_idx)],
                                                    det_hist_[static_cast<std::size_t>(det_idx)],
                                                    baseline::HistogramMetric::chisquare);
        return 1.0 - 2.0 * chi;
    }
    }
    return -1.0;
}

CostAssociator::CostAssociator(CostModel model, AssociationMethod method, sim::SimNet* net,
                               TrackerConfig cfg)
    : model_(model), method_(method), net_(net), cfg_(std::move(cfg)) {
    if (method_ == AssociationMethod::assocnet) {
        throw std::invalid_argument("CostAssociator: use AssocNetAssociator for assocnet");
    }
}

baseline::Assignment CostAssociator::associate(const AssocContext& ctx) {
    const auto& dets = *ctx.detections;
    const int n = static_cast<int>(ctx.track_boxes.size());
    const int m = static_cast<int>(dets.size());
    baseline::Assignment empty;
    if (n == 0 || m == 0) {
        for (int i = 0; i < n; ++i) empty.unmatched_rows.push_back(i);
        for (int j = 0; j < m; ++j) empty.unmatched_cols.push_back(j);
        return empty;
    }
    const FrameScorer scorer(model_, net_, ctx, cfg_);
    baseline::CostMatrix costs(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double dist = baseline::position_cost(ctx.track_boxes[static_cast<std::size_t>(i)],
                                                        dets[static_cast<std::size_t>(j)].box,
                                                        baseline::PositionMetric::euclidean);
            if (dist > cfg_.gate) {
                costs.gate(i, j);
            } else {
                costs.set(i, j, -scorer.score(i, j));
            }
        }
    }
    return method_ == AssociationMethod::hungarian ? baseline::hungarian_solve(costs)
                                                   : baseline::greedy_assign(costs);
}

AssocNetAssociator::AssocNetAssociator(CostModel model, sim::SimNet* simnet, assoc::AssocNet* assocnet,
                                       TrackerConfig cfg)
    : model_(model), simnet_(simnet), assocnet_(assocnet), cfg_(std::move(cfg)) {
    if (!assocnet_) throw std::invalid_argument("AssocNetAssociator: missing AssocNet");
    if (cfg_.grid.local_size() != assocnet_->cfg.local_size) {
        throw std::invalid_argument("AssocNetAssociator: grid local window does not match the network");
    }
}

baseline::Assignment AssocNetAssociator::associate(const AssocContext& ctx) {
    const auto& dets = *ctx.detections;
    const int n_all = static_cast<int>(ctx.track_boxes.size());
    const int m = static_cast<int>(dets.size());
    baseline::Assignment out;
    if (n_all == 0 || m == 0) {
        for (int i = 0; i < n_all; ++i) out.unmatched_rows.push_back(i);
        for (int j = 0; j < m; ++j) out.unmatched_cols.push_back(j);
        return out;
    }

    // targets whose predicted cell is outside the grid cannot be associated
    std::vector<int> net_targets;
    std::vector<sim::Cell> target_cells;
    for (int i = 0; i < n_all; ++i) {
        const auto& b = ctx.track_boxes[static_cast<std::size_t>(i)];
        const sim::Cell c = cfg_.grid.cell_of(b.cx, b.cy);
        if (c.valid()) {
            net_targets.push_back(i);
            target_cells.push_back(c);
        } else {
            out.unmatched_rows.push_back(i);
        }
    }
    if (net_targets.empty()) {
        for (int j = 0; j < m; ++j) out.unmatched_cols.push_back(j);
        return out;
    }

    const sim::OccupancyGrid occupancy = sim::build_occupancy(cfg_.grid, dets);
    const FrameScorer scorer(model_, simnet_, ctx, cfg_);
    std::vector<sim::LocalSimilarityMap> locals;
    locals.reserve(net_targets.size());
    for (std::size_t k = 0; k < net_targets.size(); ++k) {
        const sim::GlobalSimilarityMap global =
            sim::build_global_map(cfg_.grid, occupancy, scorer, net_targets[k]);
        locals.push_back(sim::crop_local_map(global, target_cells[k]));
    }

    const core::Tensor input = assoc::assemble_assoc_input(locals, assocnet_->cfg.n_max);
    const core::Tensor masks =
        assoc::build_assoc_masks(locals, occupancy, assocnet_->cfg.n_max, assocnet_->cfg.m_neg);
    const int s = assocnet_->cfg.local_size;

    core::Tape tape;
    auto in_id = tape.constant(core::Tensor({1, s, s, assocnet_->cfg.n_max}, input.v));
    auto mask_id = tape.constant(core::Tensor({1, s, s, assocnet_->cfg.n_max}, masks.v));
    auto probs_id = assoc::assoc_forward(tape, *assocnet_, in_id, mask_id, core::Mode::infer);
    const auto& probs3 = tape.val(probs_id); // [1, n_max, S*S+1]
    core::Tensor probs({static_cast<int>(net_targets.size()), assocnet_->cfg.map_width()});
    for (std::size_t t = 0; t < net_targets.size(); ++t) {
        std::copy_n(probs3.data() + t * static_cast<std::size_t>(assocnet_->cfg.map_width()),
                    static_cast<std::size_t>(assocnet_->cfg.map_width()),
                    probs.data() + t * static_cast<std::size_t>(assocnet_->cfg.map_width()));
    }
    if (map_observer) map_observer(probs, static_cast<int>(net_targets.size()));

    const baseline::Assignment net_assign = assoc::decode_assignments(probs, locals, occupancy, m);

    for (const auto& [t, j] : net_assign.matches) {
        out.matches.emplace_back(net_targets[static_cast<std::size_t>(t)], j);
    }
    out.total_cost = net_assign.total_cost;
    for (int t : net_assign.unmatched_rows) {
        out.unmatched_rows.push_back(net_targets[static_cast<std::size_t>(t)]);
    }
    std::sort(out.matches.begin(), out.matches.end());
    std::sort(out.unmatched_rows.begin(), out.unmatched_rows.end());
    out.unmatched_cols = net_assign.unmatched_cols;
    return out;
}

baseline::Assignment OracleAssociator::associate(const AssocContext& ctx) {
    const auto& dets = *ctx.detections;
    baseline::Assignment out;
    std::vector<char> det_used(dets.size(), 0);
    for (std::size_t i = 0; i < ctx.track_source_ids.size(); ++i) {
        int found = -1;
        for (std::size_t j = 0; j < dets.size(); ++j) {
            if (!det_used[j] && dets[j].source_id >= 0 && dets[j].source_id == ctx.track_source_ids[i]) {
                found = static_cast<int>(j);
                break;
            }
        }
        if (found >= 0) {
            out.matches.emplace_back(static_cast<int>(i), found);
            det_used[static_cast<std::size_t>(found)] = 1;
        } else {
            out.unmatched_rows.push_back(static_cast<int>(i));
        }
    }
    for (std::size_t j = 0; j < dets.size(); ++j) {
        if (!det_used[j]) out.unmatched_cols.push_back(static_cast<int>(j));
    }
    return out;
}

Tracker::Tracker(TrackerConfig cfg, std::unique_ptr<Associator> associator)
    : cfg_(std::move(cfg)), associator_(std::move(associator)) {}

StepStats Tracker::step(const std::vector<data::Detection>& detections, const geom::Pose& ego, double dt) {
    const auto t0 = std::chrono::steady_clock::now();
    StepStats stats;
    stats.frame = frame_idx_;
    stats.detections = static_cast<int>(detections.size());
    const geom::Pose world{};

    // predict
    for (Track& t : tracks_) {
        t.kf = kalman_predict(t.kf, dt, cfg_.kalman);
        t.existence = existence_predict(t.existence, cfg_.existence);
        ++t.age;
    }

    // associate in the ego frame
    AssocContext ctx;
    ctx.detections = &detections;
    ctx.track_boxes.reserve(tracks_.size());
    for (Track& t : tracks_) {
        ctx.track_boxes.push_back(geom::ego_compensate(t.box(), world, ego));
        ctx.track_appearances.push_back(&t.appearance);
        ctx.track_source_ids.push_back(t.source_id);
    }
    const baseline::Assignment assign = associator_->associate(ctx);

    // update matched
    for (const auto& [ti, dj] : assign.matches) {
        Track& t = tracks_[static_cast<std::size_t>(ti)];
        const data::Detection& d = detections[static_cast<std::size_t>(dj)];
        const geom::BoundingBox3D world_box = geom::ego_compensate(d.box, ego, world);
        t.kf = kalman_update(t.kf, {world_box.cx, world_box.cy, world_box.cz}, cfg_.kalman);
        t.existence = existence_update(t.existence, Outcome::matched, cfg_.existence);
        const double a = cfg_.ema_alpha;
        t.l = a * world_box.l + (1.0 - a) * t.l;
        t.w = a * world_box.w + (1.0 - a) * t.w;
        t.h = a * world_box.h + (1.0 - a) * t.h;
        // yaw blended on the circle (shortest arc)
        const double sy = a * std::sin(world_box.yaw) + (1.0 - a) * std::sin(t.yaw);
        const double cy = a * std::cos(world_box.yaw) + (1.0 - a) * std::cos(t.yaw);
        t.yaw = std::atan2(sy, cy);
        t.appearance = d.appearance;
        t.consecutive_misses = 0;
        ++stats.matched;
    }

    // missed: the prediction already propagated the state
    for (int ti : assign.unmatched_rows) {
        Track& t = tracks_[static_cast<std::size_t>(ti)];
        t.existence = existence_update(t.existence, Outcome::missed, cfg_.existence);
        ++t.consecutive_misses;
        ++stats.missed;
        ++counters_.misses;
    }

    // births from unclaimed detections
    for (int dj : assign.unmatched_cols) {
        const data::Detection& d = detections[static_cast<std::size_t>(dj)];
        const geom::BoundingBox3D world_box = geom::ego_compensate(d.box, ego, world);
        Track t;
        t.id = next_id_++;
        t.kf = kalman_init({world_box.cx, world_box.cy, world_box.cz}, cfg_.kalman);
        t.l = world_box.l;
        t.w = world_box.w;
        t.h = world_box.h;
        t.yaw = world_box.yaw;
        t.appearance = d.appearance;
        t.existence = cfg_.existence.init;
        t.source_id = d.source_id;
        tracks_.push_back(std::move(t));
        ++stats.births;
        ++counters_.births;
    }

    // prune
    std::vector<Track> kept;
    kept.reserve(tracks_.size());
    for (Track& t : tracks_) {
        if (t.existence < cfg_.existence.theta_ex) {
            ++stats.deaths;
            ++counters_.deaths;
        } else {
            kept.push_back(std::move(t));
        }
    }
    tracks_ = std::move(kept);

    ++frame_idx_;
    ++counters_.frames;
    stats.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return stats;
}

std::vector<const Track*> Tracker::reported() const {
    std::vector<const Track*> out;
    for (const Track& t : tracks_) {
        if (t.existence >= cfg_.existence.report_threshold) out.push_back(&t);
    }
    return out;
}

} // namespace mot::track
