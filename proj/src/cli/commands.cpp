#include "mot/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mot/assoc/assocnet.hpp"
#include "mot/data/kitti.hpp"
#include "mot/eval/clearmot.hpp"
#include "mot/track/tracker.hpp"
#include "mot/train/training.hpp"

namespace fs = std::filesystem;

namespace mot::cli {

namespace {

std::uint64_t derived_seed(std::uint64_t base, std::uint64_t domain, std::uint64_t index) {
    core::Rng rng(base);
    return rng.fork(domain * 1000003ULL + index).next_u64();
}

// seed domains, stable across commands so every consumer of a data
// directory sees the same simulated detections
constexpr std::uint64_t kSeedScenario = 1;
constexpr std::uint64_t kSeedPairsTrain = 2;
constexpr std::uint64_t kSeedPairsVal = 3;
constexpr std::uint64_t kSeedDetections = 5;
constexpr std::uint64_t kSeedTrainNet = 7;

void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

std::string seq_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "seq_%04d", index);
    return buf;
}

data::Scenario slice_scenario(const data::Scenario& s, std::size_t from, std::size_t to) {
    data::Scenario out;
    out.name = s.name;
    out.framerate = s.framerate;
    out.frames.assign(s.frames.begin() + static_cast<std::ptrdiff_t>(from),
                      s.frames.begin() + static_cast<std::ptrdiff_t>(to));
    return out;
}

std::vector<data::KittiRecord> scenario_to_kitti(const data::Scenario& s) {
    std::vector<data::KittiRecord> records;
    for (std::size_t f = 0; f < s.frames.size(); ++f) {
        for (const auto& obj : s.frames[f].objects) {
            data::KittiRecord r;
            r.frame = static_cast<int>(f);
            r.track_id = obj.id;
            r.type = "Car";
            r.height = obj.box.h;
            r.width = obj.box.w;
            r.length = obj.box.l;
            r.x = obj.box.cx;
            r.y = obj.box.cy;
            r.z = obj.box.cz;
            r.rotation_y = obj.box.yaw;
            records.push_back(std::move(r));
        }
    }
    return records;
}

track::CostModel parse_cost(const std::string& s) {
    if (s == "simnet") return track::CostModel::simnet;
    if (s == "euclidean") return track::CostModel::euclidean;
    if (s == "manhattan") return track::CostModel::manhattan;
    if (s == "bhattacharyya") return track::CostModel::bhattacharyya;
    if (s == "chisquare") return track::CostModel::chisquare;
    throw std::invalid_argument("unknown cost model '" + s + "'");
}

track::AssociationMethod parse_association(const std::string& s) {
    if (s == "assocnet") return track::AssociationMethod::assocnet;
    if (s == "hungarian") return track::AssociationMethod::hungarian;
    if (s == "greedy") return track::AssociationMethod::greedy;
    throw std::invalid_argument("unknown association method '" + s + "'");
}

struct SequenceResult {
    std::string name;
    std::vector<data::KittiRecord> track_records;
    std::vector<eval::FrameBoxes> hyp_frames;
    track::TrackerCounters counters;
    double total_latency_ms = 0.0;
    int frames = 0;
};

/// Runs one tracker over one scenario with pre-simulated detections.
SequenceResult run_sequence(const data::Scenario& scenario,
                            const std::vector<std::vector<data::Detection>>& dets,
                            const track::TrackerConfig& tcfg, track::CostModel cost,
                            track::AssociationMethod method, sim::SimNet* simnet,
                            assoc::AssocNet* assocnet, const std::string& dump_dir,
                            const std::string& name) {
    std::unique_ptr<track::Associator> assoc_ptr;
    if (method == track::AssociationMethod::assocnet) {
        auto a = std::make_unique<track::AssocNetAssociator>(cost, simnet, assocnet, tcfg);
        if (!dump_dir.empty()) {
            auto frame_counter = std::make_shared<int>(0);
            const std::string prefix = dump_dir + "/maps_" + name + "_f";
            a->map_observer = [frame_counter, prefix](const core::Tensor& probs, int n) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%05d.txt", *frame_counter);
                assoc::dump_association_maps(probs, n, prefix + buf);
                ++*frame_counter;
            };
        }
        assoc_ptr = std::move(a);
    } else {
        assoc_ptr = std::make_unique<track::CostAssociator>(cost, method, simnet, tcfg);
    }

    track::Tracker tracker(tcfg, std::move(assoc_ptr));
    SequenceResult result;
    result.name = name;
    const double dt = 1.0 / scenario.framerate;
    for (std::size_t f = 0; f < scenario.frames.size(); ++f) {
        const track::StepStats stats = tracker.step(dets[f], scenario.frames[f].ego, dt);
        result.total_latency_ms += stats.latency_ms;
        eval::FrameBoxes frame;
        for (const track::Track* t : tracker.reported()) {
            frame.add(t->id, t->box());
            data::KittiRecord r;
            r.frame = static_cast<int>(f);
            r.track_id = t->id;
            r.type = "Car";
            r.height = t->h;
            r.width = t->w;
            r.length = t->l;
            r.x = t->kf.x[0];
            r.y = t->kf.x[1];
            r.z = t->kf.x[2];
            r.rotation_y = t->yaw;
            r.has_score = true;
            r.score = t->existence;
            result.track_records.push_back(std::move(r));
        }
        result.hyp_frames.push_back(std::move(frame));
        ++result.frames;
    }
    result.counters = tracker.counters();
    return result;
}

std::vector<eval::FrameBoxes> gt_frames_of(const data::Scenario& s) {
    std::vector<eval::FrameBoxes> out;
    for (const auto& frame : s.frames) {
        eval::FrameBoxes fb;
        for (const auto& obj : frame.objects) fb.add(obj.id, obj.box);
        out.push_back(std::move(fb));
    }
    return out;
}

std::vector<std::pair<std::string, data::Scenario>> load_scenarios_dir(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no scenario files in " + dir);
    std::vector<std::pair<std::string, data::Scenario>> out;
    for (const auto& f : files) out.emplace_back(fs::path(f).stem().string(), data::load_scenario(f));
    return out;
}

void append_log_line(const std::string& path, const std::string& net, const train::EpochLog& log) {
    std::ofstream os(path, std::ios::app);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"net\":\"%s\",\"epoch\":%d,\"loss\":%.6f,\"val_metric\":%.6f,\"lr\":%.9g,"
                  "\"skipped_steps\":%lld}\n",
                  net.c_str(), log.epoch, log.loss, log.val_metric, log.lr,
                  static_cast<long long>(log.skipped_steps));
    os << buf;
}

std::vector<eval::FrameBoxes> frames_from_records(const std::vector<data::KittiRecord>& records,
                                                  int frame_count, bool filter_car) {
    std::vector<eval::FrameBoxes> frames(static_cast<std::size_t>(frame_count));
    for (const auto& r : records) {
        if (filter_car && r.type != "Car") continue;
        if (r.frame < 0 || r.frame >= frame_count) {
            throw std::runtime_error("record frame " + std::to_string(r.frame) + " outside sequence range");
        }
        frames[static_cast<std::size_t>(r.frame)].add(r.track_id, r.box());
    }
    return frames;
}

} // namespace

RunConfig make_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg.apply_file(resolve_path(args.config_path));
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
    return cfg;
}

std::string resolve_path(const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    const char* root = std::getenv("MOTTK_DATA_ROOT");
    if (!root || !*root) return path;
    return (fs::path(root) / path).string();
}

int cmd_generate_data(const CommonArgs& common, const std::string& out_dir_in) {
    const RunConfig cfg = make_config(common);
    const std::string out = resolve_path(out_dir_in);
    ensure_dir(out);
    ensure_dir(out + "/scenarios");
    ensure_dir(out + "/kitti_gt");
    ensure_dir(out + "/pairs");
    cfg.write(out + "/config.txt");

    const auto scen_cfg = cfg.scenario_config();
    const auto pair_cfg = cfg.pair_config();
    const int nseq = static_cast<int>(cfg.geti("scenario.num_sequences"));
    std::vector<sim::TrainingPair> train_pairs, val_pairs;
    std::int64_t total_boxes = 0;

    for (int i = 0; i < nseq; ++i) {
        data::Scenario s =
            data::generate_scenario(scen_cfg, derived_seed(cfg.seed(), kSeedScenario, static_cast<std::uint64_t>(i)));
        s.name = seq_name(i);
        data::save_scenario(s, out + "/scenarios/" + s.name + ".txt");
        data::write_kitti_records(scenario_to_kitti(s), out + "/kitti_gt/" + s.name + ".txt");
        for (const auto& f : s.frames) total_boxes += static_cast<std::int64_t>(f.objects.size());

        // per-sequence 80/20 frame split for the pair datasets
        const std::size_t cut = (s.frames.size() * 8) / 10;
        if (cut >= 2) {
            const auto head = slice_scenario(s, 0, cut);
            const auto p = sim::generate_training_pairs(
                head, pair_cfg, derived_seed(cfg.seed(), kSeedPairsTrain, static_cast<std::uint64_t>(i)));
            train_pairs.insert(train_pairs.end(), p.begin(), p.end());
        }
        if (s.frames.size() - cut >= 2) {
            const auto tail = slice_scenario(s, cut, s.frames.size());
            const auto p = sim::generate_training_pairs(
                tail, pair_cfg, derived_seed(cfg.seed(), kSeedPairsVal, static_cast<std::uint64_t>(i)));
            val_pairs.insert(val_pairs.end(), p.begin(), p.end());
        }
    }
    sim::save_pairs(train_pairs, out + "/pairs/train.bin");
    sim::save_pairs(val_pairs, out + "/pairs/val.bin");

    std::size_t positives = 0;
    for (const auto& p : train_pairs) {
        if (p.label == 1) ++positives;
    }
    std::cout << "generated " << nseq << " sequences (" << total_boxes << " ground-truth boxes), "
              << train_pairs.size() << " training pairs (" << positives << " positive), "
              << val_pairs.size() << " validation pairs\n";
    return 0;
}

int cmd_train(const CommonArgs& common, const TrainArgs& args) {
    const RunConfig cfg = make_config(common);
    const std::string out = resolve_path(args.out_dir);
    ensure_dir(out);
    cfg.write(out + "/config.txt");
    const std::string log_path = out + "/train_log.txt";
    core::Rng rng(derived_seed(cfg.seed(), kSeedTrainNet, args.which == "simnet" ? 0 : 1));

    if (args.which == "simnet") {
        const std::string pair_dir = resolve_path(args.data_dir) + "/pairs";
        if (!fs::exists(pair_dir + "/train.bin")) {
            std::cerr << "error: no pair dataset at " << pair_dir
                      << "; run 'mottk generate-data --out <dir>' first\n";
            return 1;
        }
        const auto train_set = sim::load_pairs(pair_dir + "/train.bin");
        const auto val_set = sim::load_pairs(pair_dir + "/val.bin");

        sim::SimNet net = sim::SimNet::init(cfg.simnet_config(), rng);
        int start_epoch = 0;
        train::SimNetTrainConfig tc;
        tc.schedule = cfg.simnet_schedule();
        tc.batch_size = static_cast<int>(cfg.geti("train.simnet.batch_size"));
        tc.max_epochs = static_cast<int>(cfg.geti("train.simnet.max_epochs"));
        tc.patience = static_cast<int>(cfg.geti("train.simnet.patience"));
        tc.target_accuracy = cfg.getd("train.simnet.target_accuracy");
        core::Adam opt(net.params(), tc.schedule, 0.9, cfg.getd("train.simnet.beta2"));
        if (!args.resume_path.empty()) {
            const core::Checkpoint ck = core::Checkpoint::load(resolve_path(args.resume_path));
            net = sim::SimNet::init(sim::simnet_config_from_meta(ck), rng);
            sim::read_simnet_checkpoint(net, ck);
            opt = core::Adam(net.params(), tc.schedule, 0.9, cfg.getd("train.simnet.beta2"));
            train::load_optimizer_state(ck, opt);
            start_epoch = static_cast<int>(ck.meta_or("epoch", -1)) + 1;
        }
        opt.set_clip_norm(cfg.getd("train.simnet.clip_norm"));

        const std::string ckpt_path = out + "/simnet.ckpt";
        auto save = [&](int epoch) {
            core::Checkpoint ck;
            sim::fill_simnet_checkpoint(net, ck);
            train::save_optimizer_state(ck, opt);
            ck.meta["epoch"] = epoch;
            ck.save(ckpt_path);
        };
        const train::TrainResult res =
            train::train_simnet(net, train_set, val_set, tc, rng, opt, start_epoch,
                                [&](const train::EpochLog& log) {
                                    append_log_line(log_path, "simnet", log);
                                    save(log.epoch);
                                });
        std::cout << "simnet: best val accuracy " << res.best_val << " at epoch " << res.best_epoch
                  << ", checkpoint " << ckpt_path << "\n";
        return 0;
    }
    if (args.which == "assocnet") {
        if (args.simnet_path.empty()) {
            std::cerr << "error: training assocnet needs --simnet <checkpoint>\n";
            return 1;
        }
        sim::SimNet simnet = sim::load_simnet(resolve_path(args.simnet_path));

        assoc::AssocNet net = assoc::AssocNet::init(cfg.assocnet_config(), rng);
        int start_epoch = 0;
        train::AssocTrainConfig tc;
        tc.schedule = cfg.assocnet_schedule();
        tc.batch_size = static_cast<int>(cfg.geti("train.assocnet.batch_size"));
        tc.steps_per_epoch = static_cast<int>(cfg.geti("train.assocnet.steps_per_epoch"));
        tc.max_epochs = static_cast<int>(cfg.geti("train.assocnet.max_epochs"));
        tc.patience = static_cast<int>(cfg.geti("train.assocnet.patience"));
        tc.target_accuracy = cfg.getd("train.assocnet.target_accuracy");
        tc.val_scenes = static_cast<int>(cfg.geti("train.assocnet.val_scenes"));
        core::Adam opt(net.params(), tc.schedule, 0.9, cfg.getd("train.assocnet.beta2"));
        if (!args.resume_path.empty()) {
            const core::Checkpoint ck = core::Checkpoint::load(resolve_path(args.resume_path));
            assoc::read_assocnet_checkpoint(net, ck);
            train::load_optimizer_state(ck, opt);
            start_epoch = static_cast<int>(ck.meta_or("epoch", -1)) + 1;
        }
        opt.set_clip_norm(cfg.getd("train.assocnet.clip_norm"));

        train::AssocSceneConfig scene;
        scene.targets_min = static_cast<int>(cfg.geti("train.assocnet.targets_min"));
        scene.targets_max = static_cast<int>(cfg.geti("train.assocnet.targets_max"));
        scene.pred_sigma = cfg.getd("train.assocnet.pred_sigma");
        scene.ambiguous_fraction = cfg.getd("train.assocnet.ambiguous_fraction");
        scene.noise = cfg.noise_model();
        scene.grid = cfg.grid();
        scene.appearance = cfg.appearance_geometry();

        const std::string ckpt_path = out + "/assocnet.ckpt";
        auto save = [&](int epoch) {
            core::Checkpoint ck;
            assoc::fill_assocnet_checkpoint(net, ck);
            train::save_optimizer_state(ck, opt);
            ck.meta["epoch"] = epoch;
            ck.save(ckpt_path);
        };
        const train::TrainResult res =
            train::train_assocnet(net, simnet, scene, tc, rng, opt, start_epoch,
                                  [&](const train::EpochLog& log) {
                                      append_log_line(log_path, "assocnet", log);
                                      save(log.epoch);
                                  });
        std::cout << "assocnet: best val argmax accuracy " << res.best_val << " at epoch "
                  << res.best_epoch << ", checkpoint " << ckpt_path << "\n";
        return 0;
    }
    std::cerr << "error: unknown network '" << args.which << "' (expected simnet or assocnet)\n";
    return 1;
}

int cmd_track(const CommonArgs& common, const TrackArgs& args) {
    const RunConfig cfg = make_config(common);
    const track::CostModel cost = parse_cost(args.cost);
    const track::AssociationMethod method = parse_association(args.association);

    sim::SimNet simnet;
    assoc::AssocNet assocnet;
    sim::SimNet* simnet_ptr = nullptr;
    assoc::AssocNet* assocnet_ptr = nullptr;
    if (cost == track::CostModel::simnet) {
        if (args.simnet_path.empty()) {
            std::cerr << "error: cost simnet needs --simnet <checkpoint>\n";
            return 1;
        }
        simnet = sim::load_simnet(resolve_path(args.simnet_path));
        simnet_ptr = &simnet;
    }
    if (method == track::AssociationMethod::assocnet) {
        if (args.assocnet_path.empty()) {
            std::cerr << "error: association assocnet needs --assocnet <checkpoint>\n";
            return 1;
        }
        assocnet = assoc::load_assocnet(resolve_path(args.assocnet_path));
        assocnet_ptr = &assocnet;
    }

    std::vector<std::pair<std::string, data::Scenario>> scenarios;
    if (!args.scenario_path.empty()) {
        scenarios.emplace_back(fs::path(args.scenario_path).stem().string(),
                               data::load_scenario(resolve_path(args.scenario_path)));
    } else if (!args.kitti_labels.empty()) {
        data::Scenario s = data::parse_kitti_labels(resolve_path(args.kitti_labels));
        if (!args.kitti_poses.empty()) {
            data::apply_ego_poses(s, data::parse_ego_poses(resolve_path(args.kitti_poses)));
        }
        scenarios.emplace_back(fs::path(args.kitti_labels).stem().string(), std::move(s));
    } else if (!args.data_dir.empty()) {
        scenarios = load_scenarios_dir(resolve_path(args.data_dir) + "/scenarios");
    } else {
        std::cerr << "error: one of --scenario, --data, --kitti is required\n";
        return 1;
    }

    const std::string out = resolve_path(args.out_dir);
    ensure_dir(out);
    ensure_dir(out + "/tracks");
    if (!args.dump_maps_dir.empty()) ensure_dir(resolve_path(args.dump_maps_dir));
    cfg.write(out + "/config.txt");

    const auto tcfg = cfg.tracker_config();
    const auto noise = cfg.noise_model();
    const auto geometry = cfg.appearance_geometry();

    std::ofstream summary(out + "/summary.txt");
    summary << "association=" << args.association << " cost=" << args.cost << "\n";
    double latency_total = 0.0;
    std::int64_t frames_total = 0;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto& [name, scenario] = scenarios[i];
        const auto dets = data::simulate_detections(
            scenario, noise, derived_seed(cfg.seed(), kSeedDetections, static_cast<std::uint64_t>(i)),
            geometry);
        const SequenceResult res = run_sequence(scenario, dets, tcfg, cost, method, simnet_ptr,
                                                assocnet_ptr, resolve_path(args.dump_maps_dir), name);
        data::write_kitti_records(res.track_records, out + "/tracks/" + name + ".txt");
        summary << name << " frames=" << res.frames << " births=" << res.counters.births
                << " deaths=" << res.counters.deaths << " misses=" << res.counters.misses
                << " reported=" << res.track_records.size() << "\n";
        latency_total += res.total_latency_ms;
        frames_total += res.frames;
    }
    std::ofstream timing(out + "/timing.txt");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "frames=%lld\nmean_latency_ms=%.3f\n",
                  static_cast<long long>(frames_total),
                  frames_total > 0 ? latency_total / static_cast<double>(frames_total) : 0.0);
    timing << buf;
    std::cout << "tracked " << scenarios.size() << " sequence(s), " << frames_total << " frames, mean "
              << (frames_total > 0 ? latency_total / static_cast<double>(frames_total) : 0.0)
              << " ms/frame\n";
    return 0;
}

int cmd_evaluate(const CommonArgs& common, const EvaluateArgs& args) {
    const RunConfig cfg = make_config(common);
    const std::string gt_path = resolve_path(args.gt_path);
    const std::string hyp_path = resolve_path(args.hyp_path);

    std::vector<std::pair<std::string, std::string>> file_pairs;
    if (fs::is_directory(gt_path)) {
        if (!fs::is_directory(hyp_path)) {
            std::cerr << "error: --gt is a directory but --hyp is not\n";
            return 1;
        }
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(gt_path)) {
            if (e.is_regular_file() && e.path().extension() == ".txt") {
                names.push_back(e.path().filename().string());
            }
        }
        std::sort(names.begin(), names.end());
        for (const auto& n : names) {
            const std::string hyp_file = (fs::path(hyp_path) / n).string();
            if (!fs::exists(hyp_file)) {
                std::cerr << "error: sequence mismatch, missing hypothesis file " << hyp_file << "\n";
                return 1;
            }
            file_pairs.emplace_back((fs::path(gt_path) / n).string(), hyp_file);
        }
        if (file_pairs.empty()) {
            std::cerr << "error: no ground-truth files in " << gt_path << "\n";
            return 1;
        }
    } else {
        file_pairs.emplace_back(gt_path, hyp_path);
    }

    eval::ClearMot acc(cfg.mot_config());
    for (const auto& [gt_file, hyp_file] : file_pairs) {
        const auto gt_records = data::parse_kitti_records(gt_file);
        const auto hyp_records = data::parse_kitti_records(hyp_file);
        int frame_count = 0;
        for (const auto& r : gt_records) frame_count = std::max(frame_count, r.frame + 1);
        for (const auto& r : hyp_records) {
            if (r.frame >= frame_count) {
                std::cerr << "error: sequence mismatch, hypothesis frame " << r.frame
                          << " beyond ground truth in " << hyp_file << "\n";
                return 1;
            }
        }
        const auto gt_frames = frames_from_records(gt_records, frame_count, true);
        const auto hyp_frames = frames_from_records(hyp_records, frame_count, false);
        acc.begin_sequence();
        for (int f = 0; f < frame_count; ++f) {
            acc.match_frame(gt_frames[static_cast<std::size_t>(f)], hyp_frames[static_cast<std::size_t>(f)]);
        }
    }
    const eval::MotReport report = acc.report();
    if (!report.mota_defined) std::cerr << "warning: no ground-truth boxes, MOTA undefined\n";

    if (!args.out_dir.empty()) {
        const std::string out = resolve_path(args.out_dir);
        ensure_dir(out);
        cfg.write(out + "/config.txt");
        std::ofstream txt(out + "/metrics.txt");
        eval::write_report(report, txt);
        std::ofstream kv(out + "/metrics.kv");
        eval::write_report_kv(report, kv);
    }
    eval::write_report(report, std::cout);
    return 0;
}

int cmd_ablate(const CommonArgs& common, const AblateArgs& args) {
    const RunConfig cfg = make_config(common);
    const std::string out = resolve_path(args.out_dir);
    ensure_dir(out);
    cfg.write(out + "/config.txt");

    sim::SimNet simnet = sim::load_simnet(resolve_path(args.simnet_path));
    assoc::AssocNet assocnet = assoc::load_assocnet(resolve_path(args.assocnet_path));
    const auto scenarios = load_scenarios_dir(resolve_path(args.data_dir) + "/scenarios");
    const auto tcfg = cfg.tracker_config();
    const auto noise = cfg.noise_model();
    const auto geometry = cfg.appearance_geometry();

    // identical detections for every combination
    std::vector<std::vector<std::vector<data::Detection>>> dets;
    std::vector<std::vector<eval::FrameBoxes>> gt;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        dets.push_back(data::simulate_detections(
            scenarios[i].second, noise, derived_seed(cfg.seed(), kSeedDetections, static_cast<std::uint64_t>(i)),
            geometry));
        gt.push_back(gt_frames_of(scenarios[i].second));
    }

    struct Combo {
        const char* name;
        track::CostModel cost;
        track::AssociationMethod method;
    };
    const std::vector<Combo> combos = {
        {"euclidean+assocnet", track::CostModel::euclidean, track::AssociationMethod::assocnet},
        {"manhattan+assocnet", track::CostModel::manhattan, track::AssociationMethod::assocnet},
        {"bhattacharyya+assocnet", track::CostModel::bhattacharyya, track::AssociationMethod::assocnet},
        {"chisquare+assocnet", track::CostModel::chisquare, track::AssociationMethod::assocnet},
        {"simnet+hungarian", track::CostModel::simnet, track::AssociationMethod::hungarian},
        {"simnet+assocnet", track::CostModel::simnet, track::AssociationMethod::assocnet},
    };

    std::ofstream table(out + "/ablation.txt");
    std::ofstream kv(out + "/ablation.kv");
    std::ofstream timing(out + "/timing.txt");
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-24s %-8s %-8s %-8s %-8s %-8s %-6s %-6s\n", "Method", "MOTA",
                  "MOTP", "MT", "PT", "ML", "IDS", "FRAG");
    table << buf;
    std::cout << buf;

    for (const Combo& combo : combos) {
        const std::string combo_dir = out + "/" + combo.name + "/tracks";
        ensure_dir(combo_dir);
        std::vector<std::vector<eval::FrameBoxes>> hyp;
        double latency = 0.0;
        std::int64_t frames = 0;
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            const SequenceResult res =
                run_sequence(scenarios[i].second, dets[i], tcfg, combo.cost, combo.method, &simnet,
                             &assocnet, "", scenarios[i].first);
            data::write_kitti_records(res.track_records, combo_dir + "/" + scenarios[i].first + ".txt");
            hyp.push_back(res.hyp_frames);
            latency += res.total_latency_ms;
            frames += res.frames;
        }
        const eval::MotReport r = eval::evaluate_sequences(gt, hyp, cfg.mot_config());
        std::snprintf(buf, sizeof(buf), "%-24s %-8.2f %-8.2f %-8.2f %-8.2f %-8.2f %-6d %-6d\n",
                      combo.name, r.mota, r.motp, r.mt, r.pt, r.ml, r.ids, r.frag);
        table << buf;
        std::cout << buf;
        std::snprintf(buf, sizeof(buf),
                      "%s.MOTA=%.4f\n%s.MOTP=%.4f\n%s.MT=%.4f\n%s.PT=%.4f\n%s.ML=%.4f\n%s.IDS=%d\n%s."
                      "FRAG=%d\n%s.FP=%d\n%s.FN=%d\n",
                      combo.name, r.mota, combo.name, r.motp, combo.name, r.mt, combo.name, r.pt,
                      combo.name, r.ml, combo.name, r.ids, combo.name, r.frag, combo.name, r.fp,
                      combo.name, r.fn);
        kv << buf;
        std::snprintf(buf, sizeof(buf), "%s.mean_latency_ms=%.3f\n", combo.name,
                      frames > 0 ? latency / static_cast<double>(frames) : 0.0);
        timing << buf;
    }
    return 0;
}

} // namespace mot::cli
