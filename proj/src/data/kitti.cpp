#include "mot/data/kitti.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mot::data {

std::vector<KittiRecord> parse_kitti_records(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("kitti: cannot open: " + path);
    std::vector<KittiRecord> records;
    std::string line;
    int lineno = 0;
    int last_frame = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        KittiRecord r;
        ls >> r.frame >> r.track_id >> r.type >> r.truncated >> r.occluded >> r.alpha >> r.bbox[0] >>
            r.bbox[1] >> r.bbox[2] >> r.bbox[3] >> r.height >> r.width >> r.length >> r.x >> r.y >> r.z >>
            r.rotation_y;
        if (!ls) {
            throw std::runtime_error("kitti: malformed line " + std::to_string(lineno) + " in " + path);
        }
        double score;
        if (ls >> score) {
            r.has_score = true;
            r.score = score;
        }
        std::string extra;
        if (ls >> extra) {
            throw std::runtime_error("kitti: trailing fields on line " + std::to_string(lineno) + " in " +
                                     path);
        }
        if (r.frame < last_frame) {
            throw std::runtime_error("kitti: out-of-order frame on line " + std::to_string(lineno) +
                                     " in " + path);
        }
        last_frame = r.frame;
        records.push_back(std::move(r));
    }
    return records;
}

void write_kitti_records(const std::vector<KittiRecord>& records, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("kitti: cannot open for writing: " + path);
    char buf[512];
    for (const KittiRecord& r : records) {
        std::snprintf(buf, sizeof(buf),
                      "%d %d %s %.6f %d %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f",
                      r.frame, r.track_id, r.type.c_str(), r.truncated, r.occluded, r.alpha, r.bbox[0],
                      r.bbox[1], r.bbox[2], r.bbox[3], r.height, r.width, r.length, r.x, r.y, r.z,
                      r.rotation_y);
        os << buf;
        if (r.has_score) {
            std::snprintf(buf, sizeof(buf), " %.6f", r.score);
            os << buf;
        }
        os << "\n";
    }
    if (!os) throw std::runtime_error("kitti: write failed: " + path);
}

Scenario scenario_from_records(const std::vector<KittiRecord>& records,
                               const std::vector<std::string>& classes) {
    Scenario s;
    int max_frame = -1;
    for (const auto& r : records) max_frame = std::max(max_frame, r.frame);
    s.frames.resize(static_cast<std::size_t>(max_frame + 1));
    for (std::size_t f = 0; f < s.frames.size(); ++f) s.frames[f].time = static_cast<double>(f) / s.framerate;
    for (const auto& r : records) {
        if (std::find(classes.begin(), classes.end(), r.type) == classes.end()) continue;
        s.frames[static_cast<std::size_t>(r.frame)].objects.push_back(LabeledBox{r.track_id, r.box()});
    }
    return s;
}

Scenario parse_kitti_labels(const std::string& path, const std::vector<std::string>& classes) {
    return scenario_from_records(parse_kitti_records(path), classes);
}

std::vector<geom::Pose> parse_ego_poses(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("poses: cannot open: " + path);
    std::vector<geom::Pose> poses;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        geom::Pose p;
        ls >> p.x >> p.y >> p.z >> p.yaw;
        if (!ls) throw std::runtime_error("poses: malformed line " + std::to_string(lineno) + " in " + path);
        poses.push_back(p);
    }
    return poses;
}

void write_ego_poses(const std::vector<geom::Pose>& poses, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("poses: cannot open for writing: " + path);
    char buf[256];
    for (const auto& p : poses) {
        std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f\n", p.x, p.y, p.z, p.yaw);
        os << buf;
    }
}

void apply_ego_poses(Scenario& scenario, const std::vector<geom::Pose>& poses) {
    if (poses.size() != scenario.frames.size()) {
        throw std::runtime_error("poses: count " + std::to_string(poses.size()) +
                                 " does not match frame count " + std::to_string(scenario.frames.size()));
    }
    for (std::size_t i = 0; i < poses.size(); ++i) scenario.frames[i].ego = poses[i];
}

} // namespace mot::data
