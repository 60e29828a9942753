// mottk: multi-object tracking toolkit CLI.
//
// Subcommands: generate-data, train, track, evaluate, ablate. Every command
// takes a config file plus --set key=value overrides and writes the resolved
// configuration next to its outputs. Relative paths resolve under
// $MOTTK_DATA_ROOT when set.

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "mot/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"multi-object tracking toolkit"};
    app.require_subcommand(1);

    mot::cli::CommonArgs common;
    app.add_option("--config", common.config_path, "run configuration file")->capture_default_str();
    app.add_option("--set", common.overrides, "override a config key (key=value), repeatable");
    app.add_option("--seed", common.seed, "override the run seed");

    std::string out_dir;
    auto* gen = app.add_subcommand("generate-data", "generate scenarios, KITTI ground truth and pair datasets");
    gen->add_option("--out", out_dir, "output directory")->required();

    mot::cli::TrainArgs train_args;
    auto* train = app.add_subcommand("train", "train simnet or assocnet");
    train->add_option("network", train_args.which, "simnet | assocnet")->required();
    train->add_option("--data", train_args.data_dir, "generate-data output directory (simnet)");
    train->add_option("--out", train_args.out_dir, "output directory")->required();
    train->add_option("--simnet", train_args.simnet_path, "trained SimNet checkpoint (assocnet)");
    train->add_option("--resume", train_args.resume_path, "checkpoint to resume from");

    mot::cli::TrackArgs track_args;
    auto* track = app.add_subcommand("track", "run the tracker over scenarios or KITTI labels");
    track->add_option("--scenario", track_args.scenario_path, "single scenario file");
    track->add_option("--data", track_args.data_dir, "generate-data output directory");
    track->add_option("--kitti", track_args.kitti_labels, "KITTI tracking label file");
    track->add_option("--poses", track_args.kitti_poses, "ego pose table for --kitti");
    track->add_option("--out", track_args.out_dir, "output directory")->required();
    track->add_option("--association", track_args.association, "assocnet | hungarian | greedy")
        ->capture_default_str();
    track->add_option("--cost", track_args.cost,
                      "simnet | euclidean | manhattan | bhattacharyya | chisquare")
        ->capture_default_str();
    track->add_option("--simnet", track_args.simnet_path, "SimNet checkpoint");
    track->add_option("--assocnet", track_args.assocnet_path, "AssocNet checkpoint");
    track->add_option("--dump-assoc-maps", track_args.dump_maps_dir,
                      "directory for association-map text dumps");

    mot::cli::EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "CLEAR MOT metrics for hypothesis vs ground truth");
    evaluate->add_option("--gt", eval_args.gt_path, "ground-truth KITTI file or directory")->required();
    evaluate->add_option("--hyp", eval_args.hyp_path, "hypothesis KITTI file or directory")->required();
    evaluate->add_option("--out", eval_args.out_dir, "output directory for reports");

    mot::cli::AblateArgs ablate_args;
    auto* ablate = app.add_subcommand("ablate", "cost/association ablation table over a benchmark");
    ablate->add_option("--data", ablate_args.data_dir, "generate-data output directory")->required();
    ablate->add_option("--simnet", ablate_args.simnet_path, "SimNet checkpoint")->required();
    ablate->add_option("--assocnet", ablate_args.assocnet_path, "AssocNet checkpoint")->required();
    ablate->add_option("--out", ablate_args.out_dir, "output directory")->required();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return mot::cli::cmd_generate_data(common, out_dir);
        if (train->parsed()) return mot::cli::cmd_train(common, train_args);
        if (track->parsed()) return mot::cli::cmd_track(common, track_args);
        if (evaluate->parsed()) return mot::cli::cmd_evaluate(common, eval_args);
        if (ablate->parsed()) return mot::cli::cmd_ablate(common, ablate_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
