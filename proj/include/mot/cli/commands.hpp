#pragma once

#include <string>
#include <vector>

#include "mot/cli/config.hpp"

namespace mot::cli {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides; // "key=value"
    long long seed = -1;                // shortcut override, -1 = keep config
};

/// Resolves defaults + config file + overrides.
RunConfig make_config(const CommonArgs& args);

/// Relative paths resolve under $MOTTK_DATA_ROOT when it is set.
std::string resolve_path(const std::string& path);

int cmd_generate_data(const CommonArgs& common, const std::string& out_dir);

struct TrainArgs {
    std::string which; // "simnet" | "assocnet"
    std::string data_dir;
    std::string out_dir;
    std::string simnet_path; // assocnet training needs the trained SimNet
    std::string resume_path;
};
int cmd_train(const CommonArgs& common, const TrainArgs& args);

struct TrackArgs {
    std::string scenario_path; // single scenario file
    std::string data_dir;      // or a generate-data output directory
    std::string kitti_labels;  // or a KITTI label file
    std::string kitti_poses;
    std::string out_dir;
    std::string association = "assocnet"; // assocnet | hungarian | greedy
    std::string cost = "simnet";          // simnet | euclidean | manhattan | bhattacharyya | chisquare
    std::string simnet_path;
    std::string assocnet_path;
    std::string dump_maps_dir; // association-map text dumps (assocnet only)
};
int cmd_track(const CommonArgs& common, const TrackArgs& args);

struct EvaluateArgs {
    std::string gt_path;  // file or directory of KITTI files
    std::string hyp_path; // file or directory with matching names
    std::string out_dir;
};
int cmd_evaluate(const CommonArgs& common, const EvaluateArgs& args);

struct AblateArgs {
    std::string data_dir;
    std::string simnet_path;
    std::string assocnet_path;
    std::string out_dir;
};
int cmd_ablate(const CommonArgs& common, const AblateArgs& args);

} // namespace mot::cli
