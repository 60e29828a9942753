#pragma once

#include <string>
#include <vector>

#include "mot/data/scenario.hpp"
#include "mot/geom.hpp"

namespace mot::data {

/// One line of a KITTI tracking label file, all fields preserved.
struct KittiRecord {
    int frame = 0;
    int track_id = -1;
    std::string type = "Car";
    double truncated = 0.0;
    int occluded = 0;
    double alpha = 0.0;
    double bbox[4] = {0, 0, 0, 0}; // left, top, right, bottom
    double height = 0.0, width = 0.0, length = 0.0;
    double x = 0.0, y = 0.0, z = 0.0;
    double rotation_y = 0.0;
    bool has_score = false;
    double score = 0.0;

    geom::BoundingBox3D box() const {
        return {x, y, z, length, width, height, rotation_y};
    }
};

/// Parses a label/track file. Malformed lines are reported with their line
/// number; frames must be non-decreasing.
std::vector<KittiRecord> parse_kitti_records(const std::string& path);

/// Writes records in the exact field order of the tracking label layout,
/// floats at 6 decimal places.
void write_kitti_records(const std::vector<KittiRecord>& records, const std::string& path);

/// Scenario view of a label file, keeping only the listed object classes.
Scenario scenario_from_records(const std::vector<KittiRecord>& records,
                               const std::vector<std::string>& classes = {"Car"});

Scenario parse_kitti_labels(const std::string& path, const std::vector<std::string>& classes = {"Car"});

/// Per-frame ego pose table: one "x y z yaw" line per frame.
std::vector<geom::Pose> parse_ego_poses(const std::string& path);
void write_ego_poses(const std::vector<geom::Pose>& poses, const std::string& path);

/// Attaches poses to a scenario's frames; the counts must match.
void apply_ego_poses(Scenario& scenario, const std::vector<geom::Pose>& poses);

} // namespace mot::data
