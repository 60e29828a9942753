#include "mot/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mot::cli {

namespace {
constexpr double kInf = 1e30;
}

RunConfig::RunConfig() {
    define("version", 1, 1, 1, true);
    define("seed", 42, 0, 9e15, true);

    define("grid.x_min", -40.0, -kInf, kInf);
    define("grid.x_max", 40.0, -kInf, kInf);
    define("grid.y_min", 0.0, -kInf, kInf);
    define("grid.y_max", 80.0, -kInf, kInf);
    define("grid.resolution", 0.5, 1e-3, 100.0);
    define("grid.local_radius", 10, 1, 100, true);

    define("appearance.h", 7, 1, 64, true);
    define("appearance.w", 7, 1, 64, true);
    define("appearance.c", 32, 1, 1024, true);

    define("simnet.feature_dim", 128, 2, 4096, true);
    define("simnet.bbox_conv_filters", 256, 1, 4096, true);
    define("simnet.app_conv_filters", 64, 1, 4096, true);
    define("simnet.dropout_rate", 0.5, 0.0, 0.999);
    define("simnet.leaky_alpha", 0.1, 0.0, 1.0);
    define("simnet.focal_gamma", 2.0, 0.0, 10.0);
    define("simnet.wcost_cutoff", 1e-3, 0.0, 1.0);

    define("assocnet.n_max", 32, 1, 1024, true);
    define("assocnet.filters1", 32, 1, 1024, true);
    define("assocnet.filters2", 64, 1, 1024, true);
    define("assocnet.filters3", 64, 1, 1024, true);
    define("assocnet.fc_hidden", 256, 1, 8192, true);
    define("assocnet.m_neg", -1e6, -1e12, 0.0);
    define("assocnet.fc_floor", -10.0, -1e6, 0.0);
    define("assocnet.lambda_reg", 1e-4, 0.0, 1.0);
    define("assocnet.leaky_alpha", 0.1, 0.0, 1.0);

    define("train.simnet.lr_base", 5e-4, 0.0, 1.0);
    define("train.simnet.lr_decay_period", 25, 1, 1000000, true);
    define("train.simnet.lr_decay_base", 0.9, 0.0, 1.0);
    define("train.simnet.batch_size", 128, 1, 65536, true);
    define("train.simnet.max_epochs", 60, 1, 1000000, true);
    define("train.simnet.patience", 25, 1, 1000000, true);
    define("train.simnet.target_accuracy", 0.999, 0.0, 1.0);
    define("train.simnet.clip_norm", 0.0, 0.0, 1e9);
    define("train.simnet.beta2", 0.999, 0.0, 1.0);
    define("train.assocnet.lr_base", 4e-4, 0.0, 1.0);
    define("train.assocnet.lr_decay_period", 10, 1, 1000000, true);
    define("train.assocnet.lr_decay_base", 0.8, 0.0, 1.0);
    define("train.assocnet.batch_size", 8, 2, 4096, true);
    define("train.assocnet.max_epochs", 45, 1, 1000000, true);
    define("train.assocnet.steps_per_epoch", 50, 1, 1000000, true);
    define("train.assocnet.patience", 20, 1, 1000000, true);
    define("train.assocnet.target_accuracy", 0.995, 0.0, 1.0);
    define("train.assocnet.clip_norm", 5.0, 0.0, 1e9);
    define("train.assocnet.beta2", 0.95, 0.0, 1.0);
    define("train.assocnet.targets_min", 1, 1, 1024, true);
    define("train.assocnet.targets_max", 10, 1, 1024, true);
    define("train.assocnet.pred_sigma", 0.3, 0.0, 10.0);
    define("train.assocnet.ambiguous_fraction", 0.25, 0.0, 1.0);
    define("train.assocnet.val_scenes", 64, 1, 100000, true);

    define("pairs.iou_positive", 0.8, 0.0, 1.0);
    define("pairs.iou_diversity", 0.95, 0.0, 1.0);
    define("pairs.proposals_per_object", 4, 1, 1000, true);
    define("pairs.jitter_pos_sigma", 0.25, 0.0, 10.0);
    define("pairs.jitter_dim_sigma", 0.05, 0.0, 1.0);
    define("pairs.jitter_yaw_sigma", 0.05, 0.0, 3.2);
    define("pairs.negatives_per_positive", 0.72, 0.0, 100.0);
    define("pairs.appearance_sigma", 0.1, 0.0, 10.0);

    define("tracker.q_pos", 0.01, 0.0, 1000.0);
    define("tracker.q_vel", 0.25, 0.0, 1000.0);
    define("tracker.r_pos", 0.04, 1e-12, 1000.0);
    define("tracker.init_vel_var", 1.0, 0.0, 1000.0);
    define("tracker.p_survival", 0.95, 0.0, 1.0);
    define("tracker.p_detect", 0.9, 0.0, 1.0);
    define("tracker.p_false", 0.1, 0.0, 1.0);
    define("tracker.theta_ex", 0.40, 0.0, 1.0);
    define("tracker.report_threshold", 0.5, 0.0, 1.0);
    define("tracker.pe_init", 0.5, 0.0, 1.0);
    define("tracker.ema_alpha", 0.5, 0.0, 1.0);
    define("tracker.gate", 5.0, 0.1, 1000.0);
    define("tracker.histogram_bins", 32, 2, 1024, true);

    define("noise.pos_sigma", 0.15, 0.0, 10.0);
    define("noise.dim_sigma", 0.03, 0.0, 1.0);
    define("noise.yaw_sigma", 0.05, 0.0, 3.2);
    define("noise.fn_rate", 0.15, 0.0, 1.0);
    define("noise.fp_rate", 1.0, 0.0, 100.0);
    define("noise.appearance_sigma", 0.1, 0.0, 10.0);

    define("scenario.num_sequences", 20, 1, 10000, true);
    define("scenario.frames", 100, 2, 1000000, true);
    define("scenario.objects_min", 4, 0, 1000, true);
    define("scenario.objects_max", 10, 0, 1000, true);
    define("scenario.speed_min", 0.0, 0.0, 100.0);
    define("scenario.speed_max", 6.0, 0.0, 100.0);
    define("scenario.yaw_rate_max", 0.1, 0.0, 10.0);
    define("scenario.framerate", 10.0, 0.1, 1000.0);

    define("eval.match_threshold", 1.0, 1e-3, 1000.0);
}

void RunConfig::define(const std::string& key, double def, double min, double max, bool is_int) {
    entries_[key] = Entry{is_int, def, min, max};
}

const RunConfig::Entry& RunConfig::at(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    return it->second;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    Entry& e = it->second;
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
    if (pos != value.size()) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
    if (e.is_int && v != std::floor(v)) {
        throw std::invalid_argument("config: '" + key + "' expects an integer, got " + value);
    }
    if (v < e.min || v > e.max) {
        throw std::invalid_argument("config: '" + key + "' = " + value + " outside documented range");
    }
    e.value = v;
}

RunConfig RunConfig::from_file(const std::string& path) {
    RunConfig cfg;
    cfg.apply_file(path);
    return cfg;
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    bool saw_version = false;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, eq, value;
        std::istringstream ls(line);
        if (!(ls >> key)) continue; // blank
        if (!(ls >> eq >> value) || eq != "=") {
            throw std::runtime_error("config: expected 'key = value' at " + path + ":" +
                                     std::to_string(lineno));
        }
        std::string extra;
        if (ls >> extra) {
            throw std::runtime_error("config: trailing tokens at " + path + ":" + std::to_string(lineno));
        }
        try {
            set(key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string(e.what()) + " at " + path + ":" + std::to_string(lineno));
        }
        if (key == "version") saw_version = true;
    }
    if (!saw_version) throw std::runtime_error("config: missing 'version = 1' in " + path);
}

void RunConfig::write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("config: cannot open for writing: " + path);
    char buf[128];
    for (const auto& [key, e] : entries_) {
        if (e.is_int) {
            std::snprintf(buf, sizeof(buf), "%s = %lld\n", key.c_str(),
                          static_cast<long long>(e.value));
        } else {
            std::snprintf(buf, sizeof(buf), "%s = %.9g\n", key.c_str(), e.value);
        }
        os << buf;
    }
    if (!os) throw std::runtime_error("config: write failed: " + path);
}

std::int64_t RunConfig::geti(const std::string& key) const {
    const Entry& e = at(key);
    if (!e.is_int) throw std::logic_error("config: '" + key + "' is not an integer key");
    return static_cast<std::int64_t>(e.value);
}

double RunConfig::getd(const std::string& key) const { return at(key).value; }

sim::GridGeometry RunConfig::grid() const {
    sim::GridGeometry g;
    g.x_min = getd("grid.x_min");
    g.x_max = getd("grid.x_max");
    g.y_min = getd("grid.y_min");
    g.y_max = getd("grid.y_max");
    g.resolution = getd("grid.resolution");
    g.local_radius = static_cast<int>(geti("grid.local_radius"));
    if (g.x_max <= g.x_min || g.y_max <= g.y_min) throw std::invalid_argument("config: empty grid region");
    return g;
}

data::AppearanceGeometry RunConfig::appearance_geometry() const {
    return {static_cast<int>(geti("appearance.h")), static_cast<int>(geti("appearance.w")),
            static_cast<int>(geti("appearance.c"))};
}

sim::SimNetConfig RunConfig::simnet_config() const {
    sim::SimNetConfig c;
    c.feature_dim = static_cast<int>(geti("simnet.feature_dim"));
    c.bbox_conv_filters = static_cast<int>(geti("simnet.bbox_conv_filters"));
    c.app_conv_filters = static_cast<int>(geti("simnet.app_conv_filters"));
    c.appearance = appearance_geometry();
    c.dropout_rate = getd("simnet.dropout_rate");
    c.leaky_alpha = getd("simnet.leaky_alpha");
    c.focal_gamma = getd("simnet.focal_gamma");
    c.wcost_cutoff = getd("simnet.wcost_cutoff");
    return c;
}

assoc::AssocNetConfig RunConfig::assocnet_config() const {
    assoc::AssocNetConfig c;
    c.n_max = static_cast<int>(geti("assocnet.n_max"));
    c.local_size = 2 * static_cast<int>(geti("grid.local_radius")) + 1;
    c.filters1 = static_cast<int>(geti("assocnet.filters1"));
    c.filters2 = static_cast<int>(geti("assocnet.filters2"));
    c.filters3 = static_cast<int>(geti("assocnet.filters3"));
    c.fc_hidden = static_cast<int>(geti("assocnet.fc_hidden"));
    c.m_neg = getd("assocnet.m_neg");
    c.fc_floor = getd("assocnet.fc_floor");
    c.lambda_reg = getd("assocnet.lambda_reg");
    c.leaky_alpha = getd("assocnet.leaky_alpha");
    return c;
}

track::TrackerConfig RunConfig::tracker_config() const {
    track::TrackerConfig c;
    c.kalman.q_pos = getd("tracker.q_pos");
    c.kalman.q_vel = getd("tracker.q_vel");
    c.kalman.r_pos = getd("tracker.r_pos");
    c.kalman.init_vel_var = getd("tracker.init_vel_var");
    c.existence.p_survival = getd("tracker.p_survival");
    c.existence.p_detect = getd("tracker.p_detect");
    c.existence.p_false = getd("tracker.p_false");
    c.existence.theta_ex = getd("tracker.theta_ex");
    c.existence.report_threshold = getd("tracker.report_threshold");
    c.existence.init = getd("tracker.pe_init");
    c.ema_alpha = getd("tracker.ema_alpha");
    c.grid = grid();
    c.gate = getd("tracker.gate");
    c.histogram_bins = static_cast<int>(geti("tracker.histogram_bins"));
    return c;
}

data::NoiseModel RunConfig::noise_model() const {
    data::NoiseModel n;
    n.pos_sigma = getd("noise.pos_sigma");
    n.dim_sigma = getd("noise.dim_sigma");
    n.yaw_sigma = getd("noise.yaw_sigma");
    n.fn_rate = getd("noise.fn_rate");
    n.fp_rate = getd("noise.fp_rate");
    n.appearance_sigma = getd("noise.appearance_sigma");
    n.clutter_region = data::Region{getd("grid.x_min"), getd("grid.x_max"), getd("grid.y_min"),
                                    getd("grid.y_max")};
    return n;
}

data::ScenarioConfig RunConfig::scenario_config() const {
    data::ScenarioConfig s;
    s.num_frames = static_cast<int>(geti("scenario.frames"));
    s.objects_min = static_cast<int>(geti("scenario.objects_min"));
    s.objects_max = static_cast<int>(geti("scenario.objects_max"));
    if (s.objects_min > s.objects_max) throw std::invalid_argument("config: objects_min > objects_max");
    s.speed_min = getd("scenario.speed_min");
    s.speed_max = getd("scenario.speed_max");
    if (s.speed_min > s.speed_max) throw std::invalid_argument("config: speed_min > speed_max");
    s.yaw_rate_max = getd("scenario.yaw_rate_max");
    s.framerate = getd("scenario.framerate");
    s.region = data::Region{getd("grid.x_min"), getd("grid.x_max"), getd("grid.y_min"),
                            getd("grid.y_max")};
    return s;
}

sim::PairGenConfig RunConfig::pair_config() const {
    sim::PairGenConfig p;
    p.iou_positive = getd("pairs.iou_positive");
    p.iou_diversity = getd("pairs.iou_diversity");
    p.proposals_per_object = static_cast<int>(geti("pairs.proposals_per_object"));
    p.jitter_pos_sigma = getd("pairs.jitter_pos_sigma");
    p.jitter_dim_sigma = getd("pairs.jitter_dim_sigma");
    p.jitter_yaw_sigma = getd("pairs.jitter_yaw_sigma");
    p.negatives_per_positive = getd("pairs.negatives_per_positive");
    p.appearance_sigma = getd("pairs.appearance_sigma");
    p.appearance = appearance_geometry();
    return p;
}

eval::MotConfig RunConfig::mot_config() const { return {getd("eval.match_threshold")}; }

core::LrSchedule RunConfig::simnet_schedule() const {
    return {getd("train.simnet.lr_base"), static_cast<int>(geti("train.simnet.lr_decay_period")),
            getd("train.simnet.lr_decay_base")};
}

core::LrSchedule RunConfig::assocnet_schedule() const {
    return {getd("train.assocnet.lr_base"), static_cast<int>(geti("train.assocnet.lr_decay_period")),
            getd("train.assocnet.lr_decay_base")};
}

} // namespace mot::cli
