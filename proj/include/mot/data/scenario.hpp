#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mot/geom.hpp"

namespace mot::data {

struct LabeledBox {
    int id = -1;
    geom::BoundingBox3D box;
};

struct Frame {
    double time = 0.0;
    geom::Pose ego;
    std::vector<LabeledBox> objects;
};

/// Ground-truth sequence. Object boxes are in the world frame; each frame
/// records the ego pose that maps ego coordinates into the world.
struct Scenario {
    std::string name;
    double framerate = 10.0;
    std::vector<Frame> frames;
};

struct Region {
    double x_min = -40.0, x_max = 40.0;
    double y_min = 0.0, y_max = 80.0;

    bool contains(double x, double y) const {
        return x >= x_min && x < x_max && y >= y_min && y < y_max;
    }
};

struct ScenarioConfig {
    int num_frames = 100;
    int objects_min = 4;
    int objects_max = 10;
    double speed_min = 0.0;
    double speed_max = 8.0;
    double yaw_rate_max = 0.0; // curved paths when > 0, rad/s
    double framerate = 10.0;
    Region region;
    bool ego_motion = false;
    double ego_speed = 0.0;
};

/// Constant-velocity (optionally curved) objects inside the region;
/// deterministic per seed. Objects that leave the region disappear.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Versioned structured-text round trip for scenarios.
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

} // namespace mot::data
