#include "mot/train/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mot::train {

using core::Rng;
using core::Tensor;

namespace {

template <class Net, class StepFn, class ValFn>
TrainResult run_epochs(Net& net, int start_epoch, int max_epochs, int patience, double target,
                       const core::LrSchedule& schedule, StepFn&& run_epoch_steps, ValFn&& validate,
                       const EpochCallback& on_epoch, core::Adam& opt) {
    TrainResult result;
    int since_best = 0;
    std::map<std::string, Tensor> best_state;
    for (int epoch = start_epoch; epoch < max_epochs; ++epoch) {
        const double mean_loss = run_epoch_steps(epoch);
        EpochLog log;
        log.epoch = epoch;
        log.loss = mean_loss;
        log.val_metric = validate();
        log.lr = schedule.lr_at(epoch);
        log.skipped_steps = opt.steps_skipped();
        result.log.push_back(log);
        result.last_epoch = epoch;
        if (on_epoch) on_epoch(log);

        if (log.val_metric > result.best_val) {
            result.best_val = log.val_metric;
            result.best_epoch = epoch;
            since_best = 0;
            best_state.clear();
            net.visit_state([&](const std::string& name, Tensor& t) { best_state[name] = t; });
        } else {
            ++since_best;
        }
        if (log.val_metric >= target) break;
        if (since_best >= patience) break;
    }
    // the loss landscape has steep margins; keep the best validation weights
    if (!best_state.empty() && result.best_epoch != result.last_epoch) {
        net.visit_state([&](const std::string& name, Tensor& t) {
            auto it = best_state.find(name);
            if (it != best_state.end()) t = it->second;
        });
    }
    return result;
}

int poisson_count(double lambda, Rng& rng) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform();
    } while (p > limit);
    return k - 1;
}

} // namespace

TrainResult train_simnet(sim::SimNet& net, const std::vector<sim::TrainingPair>& train_set,
                         const std::vector<sim::TrainingPair>& val_set, const SimNetTrainConfig& cfg,
                         Rng& rng, core::Adam& opt, int start_epoch, const EpochCallback& on_epoch) {
    if (train_set.empty() || val_set.empty()) {
        throw std::invalid_argument("train_simnet: empty train or validation set");
    }
    std::vector<int> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    auto run_steps = [&](int epoch) {
        // deterministic shuffle
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
        }
        double loss_sum = 0.0;
        int steps = 0;
        for (std::size_t off = 0; off < order.size(); off += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), off + static_cast<std::size_t>(cfg.batch_size));
            std::vector<int> idx(order.begin() + static_cast<std::ptrdiff_t>(off),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
            const sim::PairBatch batch = sim::make_pair_batch(train_set, idx, net.cfg.appearance);

            core::Tape tape;
            Rng dropout_rng = rng.fork(0xD0);
            const auto yhat = sim::simnet_pair_forward(tape, net, batch, core::Mode::train, dropout_rng);
            std::vector<double> yhat_vals(tape.val(yhat).v.begin(), tape.val(yhat).v.end());
            const std::vector<double> weights =
                sim::skew_and_cost_weights(batch.labels, yhat_vals, net.cfg.focal_gamma, net.cfg.wcost_cutoff);
            const auto loss = sim::simnet_loss(tape, yhat, batch.labels, weights);
            loss_sum += tape.val(loss).v[0];
            ++steps;
            opt.zero_grad();
            tape.backward(loss);
            opt.step(epoch);
        }
        return steps > 0 ? loss_sum / steps : 0.0;
    };
    auto validate = [&]() { return sweep_pair_threshold(net, val_set).accuracy; };

    return run_epochs(net, start_epoch, cfg.max_epochs, cfg.patience, cfg.target_accuracy, cfg.schedule,
                      run_steps, validate, on_epoch, opt);
}

std::vector<double> pair_scores(sim::SimNet& net, const std::vector<sim::TrainingPair>& pairs) {
    std::vector<double> scores(pairs.size());
    const std::size_t chunk = 512;
    for (std::size_t off = 0; off < pairs.size(); off += chunk) {
        const std::size_t end = std::min(pairs.size(), off + chunk);
        std::vector<geom::BoundingBox3D> boxes;
        std::vector<Tensor> apps;
        for (std::size_t i = off; i < end; ++i) {
            boxes.push_back(pairs[i].target_box);
            apps.push_back(pairs[i].target_app);
        }
        for (std::size_t i = off; i < end; ++i) {
            boxes.push_back(pairs[i].detection_box);
            apps.push_back(pairs[i].detection_app);
        }
        const sim::Embeddings emb = sim::embed_objects(net, boxes, apps);
        const int b = static_cast<int>(end - off);
        for (int i = 0; i < b; ++i) {
            scores[off + static_cast<std::size_t>(i)] = sim::pair_similarity(emb, i, emb, b + i);
        }
    }
    return scores;
}

double pair_accuracy(sim::SimNet& net, const std::vector<sim::TrainingPair>& pairs, double threshold) {
    if (pairs.empty()) return 0.0;
    const std::vector<double> scores = pair_scores(net, pairs);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const bool positive = scores[i] > threshold;
        if (positive == (pairs[i].label == 1)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

PairOperatingPoint sweep_pair_threshold(sim::SimNet& net, const std::vector<sim::TrainingPair>& pairs) {
    PairOperatingPoint best;
    if (pairs.empty()) return best;
    const std::vector<double> scores = pair_scores(net, pairs);
    for (double th = -0.2; th <= 0.9 + 1e-9; th += 0.025) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const bool positive = scores[i] > th;
            if (positive == (pairs[i].label == 1)) ++correct;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(pairs.size());
        if (acc > best.accuracy) {
            best.accuracy = acc;
            best.threshold = th;
        }
    }
    return best;
}

AssocScene sample_assoc_scene(sim::SimNet& simnet, const AssocSceneConfig& cfg, int n_max, Rng& rng) {
    const auto& grid = cfg.grid;
    const double margin = 2.0;
    const int n = rng.uniform_int(cfg.targets_min, std::min(cfg.targets_max, n_max));
    const bool ambiguous =
        cfg.force_ambiguous || (cfg.ambiguous_fraction > 0.0 && rng.bernoulli(cfg.ambiguous_fraction));

    // ground-truth object centers
    std::vector<geom::BoundingBox3D> gt(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& b = gt[static_cast<std::size_t>(i)];
        bool placed = false;
        for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
            if (ambiguous && i > 0 && i % 2 == 1) {
                // plant within two cells of the previous object
                const auto& prev = gt[static_cast<std::size_t>(i - 1)];
                const double r = rng.uniform(0.3, 2.0 * grid.resolution);
                const double a = rng.uniform(-3.141592653589793, 3.141592653589793);
                b.cx = prev.cx + r * std::cos(a);
                b.cy = prev.cy + r * std::sin(a);
            } else {
                b.cx = rng.uniform(grid.x_min + margin, grid.x_max - margin);
                b.cy = rng.uniform(grid.y_min + margin, grid.y_max - margin);
            }
            placed = grid.contains(b.cx, b.cy);
            if (placed && cfg.min_spacing > 0.0) {
                for (int j = 0; j < i && placed; ++j) {
                    const double dx = b.cx - gt[static_cast<std::size_t>(j)].cx;
                    const double dy = b.cy - gt[static_cast<std::size_t>(j)].cy;
                    if (std::sqrt(dx * dx + dy * dy) < cfg.min_spacing) placed = false;
                }
            }
        }
        if (!placed) { // fall back to an unconstrained draw
            b.cx = rng.uniform(grid.x_min + margin, grid.x_max - margin);
            b.cy = rng.uniform(grid.y_min + margin, grid.y_max - margin);
        }
        b.l = rng.uniform(3.5, 5.0);
        b.w = rng.uniform(1.6, 2.0);
        b.h = rng.uniform(1.4, 1.8);
        b.cz = b.h / 2.0;
        b.yaw = rng.uniform(-3.141592653589793, 3.141592653589793);
    }

    // predicted targets: ground truth plus prediction error. A fraction get
    // the larger error of tracks whose velocity estimate is still warming
    // up, and a small fraction are "ghosts" (clutter-born tracks): random
    // appearance, no matching detection.
    std::vector<geom::BoundingBox3D> targets = gt;
    std::vector<Tensor> target_apps;
    std::vector<char> ghost(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        auto& b = targets[static_cast<std::size_t>(i)];
        const double sigma = cfg.pred_sigma * (rng.bernoulli(0.3) ? 2.2 : 1.0);
        b.cx += sigma * rng.normal();
        b.cy += sigma * rng.normal();
        b.l = std::max(0.2, b.l * (1.0 + 0.03 * rng.normal()));
        b.w = std::max(0.2, b.w * (1.0 + 0.03 * rng.normal()));
        b.yaw = geom::normalize_angle(b.yaw + 0.05 * rng.normal());
        if (!grid.contains(b.cx, b.cy)) b = gt[static_cast<std::size_t>(i)];
        if (rng.bernoulli(0.08)) {
            ghost[static_cast<std::size_t>(i)] = 1;
            const int fake = 2000000 + static_cast<int>(rng.next_u64() % 1000000);
            target_apps.push_back(data::synth_appearance(fake, cfg.noise.appearance_sigma, rng, cfg.appearance));
        } else {
            target_apps.push_back(data::synth_appearance(i, cfg.noise.appearance_sigma, rng, cfg.appearance));
        }
    }

    // detections: surviving jittered objects plus clutter
    std::vector<data::Detection> dets;
    std::vector<int> det_of_target(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (ghost[static_cast<std::size_t>(i)] || rng.bernoulli(cfg.noise.fn_rate)) continue;
        data::Detection d;
        d.box = gt[static_cast<std::size_t>(i)];
        d.box.cx += cfg.noise.pos_sigma * rng.normal();
        d.box.cy += cfg.noise.pos_sigma * rng.normal();
        d.box.cz += cfg.noise.pos_sigma * rng.normal();
        d.box.yaw = geom::normalize_angle(d.box.yaw + cfg.noise.yaw_sigma * rng.normal());
        if (!grid.contains(d.box.cx, d.box.cy)) continue;
        d.appearance = data::synth_appearance(i, cfg.noise.appearance_sigma, rng, cfg.appearance);
        d.score = rng.uniform(0.8, 1.0);
        d.source_id = i;
        det_of_target[static_cast<std::size_t>(i)] = static_cast<int>(dets.size());
        dets.push_back(std::move(d));
    }
    const int clutter = poisson_count(cfg.noise.fp_rate, rng);
    for (int c = 0; c < clutter; ++c) {
        data::Detection d;
        d.box.cx = rng.uniform(grid.x_min, grid.x_max - 1e-6);
        d.box.cy = rng.uniform(grid.y_min, grid.y_max - 1e-6);
        d.box.l = rng.uniform(3.0, 5.0);
        d.box.w = rng.uniform(1.5, 2.1);
        d.box.h = rng.uniform(1.3, 1.9);
        d.box.cz = d.box.h / 2.0;
        d.box.yaw = rng.uniform(-3.141592653589793, 3.141592653589793);
        d.appearance = data::synth_appearance(1000000 + static_cast<int>(rng.next_u64() % 1000000),
                                              cfg.noise.appearance_sigma, rng, cfg.appearance);
        d.score = rng.uniform(0.3, 0.8);
        d.source_id = -1;
        dets.push_back(std::move(d));
    }

    const sim::OccupancyGrid occupancy = sim::build_occupancy(grid, dets);
    const sim::Embeddings target_emb = sim::embed_objects(simnet, targets, target_apps);
    std::vector<geom::BoundingBox3D> det_boxes;
    std::vector<Tensor> det_apps;
    for (const auto& d : dets) {
        det_boxes.push_back(d.box);
        det_apps.push_back(d.appearance);
    }
    const sim::Embeddings det_emb = sim::embed_objects(simnet, det_boxes, det_apps);
    const sim::SimNetScorer scorer(target_emb, det_emb);

    std::vector<sim::LocalSimilarityMap> locals;
    locals.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const sim::GlobalSimilarityMap global = sim::build_global_map(grid, occupancy, scorer, i);
        const sim::Cell cell = grid.cell_of(targets[static_cast<std::size_t>(i)].cx,
                                            targets[static_cast<std::size_t>(i)].cy);
        locals.push_back(sim::crop_local_map(global, cell));
    }

    AssocScene scene;
    scene.input = assoc::assemble_assoc_input(locals, n_max);
    scene.masks = assoc::build_assoc_masks(locals, occupancy, n_max, -1e6);
    scene.truth.n = n;
    const int s = grid.local_size();
    for (int i = 0; i < n; ++i) {
        int cell_index = s * s; // spurious
        const int j = det_of_target[static_cast<std::size_t>(i)];
        if (j >= 0 && occupancy.det_cells[static_cast<std::size_t>(j)].valid()) {
            const sim::Cell local =
                locals[static_cast<std::size_t>(i)].to_local(occupancy.det_cells[static_cast<std::size_t>(j)]);
            if (local.valid()) cell_index = local.iy * s + local.ix;
        }
        scene.truth.cell.push_back(cell_index);
    }
    return scene;
}

double assoc_accuracy(assoc::AssocNet& net, const std::vector<AssocScene>& scenes) {
    if (scenes.empty()) return 0.0;
    const int s = net.cfg.local_size;
    std::size_t hits = 0, total = 0;
    for (const AssocScene& scene : scenes) {
        core::Tape tape;
        auto in = tape.constant(Tensor({1, s, s, net.cfg.n_max}, scene.input.v));
        auto mask = tape.constant(Tensor({1, s, s, net.cfg.n_max}, scene.masks.v));
        const auto probs = assoc_forward(tape, net, in, mask, core::Mode::infer);
        const auto& v = tape.val(probs);
        const int width = net.cfg.map_width();
        for (int t = 0; t < scene.truth.n; ++t) {
            const float* row = v.data() + static_cast<std::size_t>(t) * width;
            int arg = 0;
            for (int k = 1; k < width; ++k) {
                if (row[k] > row[arg]) arg = k;
            }
            if (arg == scene.truth.cell[static_cast<std::size_t>(t)]) ++hits;
            ++total;
        }
    }
    return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

TrainResult train_assocnet(assoc::AssocNet& net, sim::SimNet& simnet, const AssocSceneConfig& scene_cfg,
                           const AssocTrainConfig& cfg, Rng& rng, core::Adam& opt, int start_epoch,
                           const EpochCallback& on_epoch) {
    Rng val_rng = rng.fork(0x7A11DA);
    std::vector<AssocScene> val_scenes;
    val_scenes.reserve(static_cast<std::size_t>(cfg.val_scenes));
    for (int i = 0; i < cfg.val_scenes; ++i) {
        val_scenes.push_back(sample_assoc_scene(simnet, scene_cfg, net.cfg.n_max, val_rng));
    }

    const int s = net.cfg.local_size;
    auto run_steps = [&](int epoch) {
        double loss_sum = 0.0;
        for (int step = 0; step < cfg.steps_per_epoch; ++step) {
            const int b = cfg.batch_size;
            Tensor input({b, s, s, net.cfg.n_max});
            Tensor masks({b, s, s, net.cfg.n_max});
            std::vector<assoc::AssocTruth> truths;
            const std::size_t per = static_cast<std::size_t>(s) * s * net.cfg.n_max;
            for (int i = 0; i < b; ++i) {
                AssocScene scene = sample_assoc_scene(simnet, scene_cfg, net.cfg.n_max, rng);
                std::copy(scene.input.v.begin(), scene.input.v.end(),
                          input.v.begin() + static_cast<std::ptrdiff_t>(i * per));
                std::copy(scene.masks.v.begin(), scene.masks.v.end(),
                          masks.v.begin() + static_cast<std::ptrdiff_t>(i * per));
                truths.push_back(std::move(scene.truth));
            }
            core::Tape tape;
            auto in_id = tape.constant(std::move(input));
            auto mask_id = tape.constant(std::move(masks));
            auto probs = assoc_forward(tape, net, in_id, mask_id, core::Mode::train);
            std::vector<core::Tape::Id> reg_nodes;
            for (auto* p : net.params()) reg_nodes.push_back(tape.param(*p));
            const auto loss = assoc_loss(tape, net, probs, truths, reg_nodes);
            loss_sum += tape.val(loss).v[0];
            opt.zero_grad();
            tape.backward(loss);
            opt.step(epoch);
        }
        return loss_sum / cfg.steps_per_epoch;
    };
    auto validate = [&]() { return assoc_accuracy(net, val_scenes); };

    return run_epochs(net, start_epoch, cfg.max_epochs, cfg.patience, cfg.target_accuracy, cfg.schedule,
                      run_steps, validate, on_epoch, opt);
}

void save_optimizer_state(core::Checkpoint& ck, core::Adam& opt) {
    auto& m = opt.first_moments();
    auto& v = opt.second_moments();
    for (std::size_t i = 0; i < m.size(); ++i) {
        ck.tensors["opt.m." + std::to_string(i)] = m[i];
        ck.tensors["opt.v." + std::to_string(i)] = v[i];
    }
    ck.meta["opt.steps"] = opt.steps_taken();
}

void load_optimizer_state(const core::Checkpoint& ck, core::Adam& opt) {
    auto& m = opt.first_moments();
    auto& v = opt.second_moments();
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string km = "opt.m." + std::to_string(i), kv = "opt.v." + std::to_string(i);
        if (!ck.has(km)) return; // checkpoint without optimizer state: fresh moments
        m[i] = ck.get(km);
        v[i] = ck.get(kv);
    }
    opt.set_steps_taken(ck.meta_or("opt.steps", 0));
}

} // namespace mot::train
