#include "mot/data/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mot/core/rng.hpp"

namespace mot::data {

namespace {

struct MovingObject {
    int id;
    double x, y;
    double speed, heading, yaw_rate;
    double l, w, h;
    bool alive = true;
};

MovingObject spawn(int id, const ScenarioConfig& cfg, core::Rng& rng) {
    MovingObject o;
    o.id = id;
    o.x = rng.uniform(cfg.region.x_min + 2.0, cfg.region.x_max - 2.0);
    o.y = rng.uniform(cfg.region.y_min + 2.0, cfg.region.y_max - 2.0);
    o.speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    o.heading = rng.uniform(-3.141592653589793, 3.141592653589793);
    o.yaw_rate = cfg.yaw_rate_max > 0.0 ? rng.uniform(-cfg.yaw_rate_max, cfg.yaw_rate_max) : 0.0;
    o.l = rng.uniform(3.5, 5.0);
    o.w = rng.uniform(1.6, 2.0);
    o.h = rng.uniform(1.4, 1.8);
    return o;
}

} // namespace

Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    core::Rng rng(seed);
    Scenario s;
    s.framerate = cfg.framerate;
    const double dt = 1.0 / cfg.framerate;

    std::vector<MovingObject> objects;
    const int count = cfg.objects_max <= 0 ? 0 : rng.uniform_int(cfg.objects_min, cfg.objects_max);
    for (int i = 0; i < count; ++i) objects.push_back(spawn(i, cfg, rng));

    for (int f = 0; f < cfg.num_frames; ++f) {
        Frame frame;
        frame.time = f * dt;
        if (cfg.ego_motion) {
            frame.ego = geom::Pose{0.0, cfg.ego_speed * frame.time, 0.0, 0.0};
        }
        for (auto& o : objects) {
            if (!o.alive) continue;
            if (f > 0) {
                o.heading += o.yaw_rate * dt;
                o.x += o.speed * std::cos(o.heading) * dt;
                o.y += o.speed * std::sin(o.heading) * dt;
                const double rel_x = o.x - frame.ego.x;
                const double rel_y = o.y - frame.ego.y;
                if (!cfg.region.contains(rel_x, rel_y)) {
                    o.alive = false;
                    continue;
                }
            }
            LabeledBox lb;
            lb.id = o.id;
            lb.box = geom::BoundingBox3D{o.x, o.y, o.h / 2.0, o.l, o.w, o.h,
                                         geom::normalize_angle(o.heading)};
            frame.objects.push_back(lb);
        }
        s.frames.push_back(std::move(frame));
    }
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("scenario: cannot open for writing: " + path);
    char buf[256];
    os << "mottk-scenario v1\n";
    os << "name " << (s.name.empty() ? "-" : s.name) << "\n";
    std::snprintf(buf, sizeof(buf), "framerate %.6f\n", s.framerate);
    os << buf;
    os << "frames " << s.frames.size() << "\n";
    for (std::size_t f = 0; f < s.frames.size(); ++f) {
        const Frame& fr = s.frames[f];
        std::snprintf(buf, sizeof(buf), "frame %zu %.6f %.6f %.6f %.6f %.6f\n", f, fr.time, fr.ego.x,
                      fr.ego.y, fr.ego.z, fr.ego.yaw);
        os << buf;
        for (const LabeledBox& o : fr.objects) {
            std::snprintf(buf, sizeof(buf), "obj %d %.6f %.6f %.6f %.6f %.6f %.6f %.6f\n", o.id, o.box.cx,
                          o.box.cy, o.box.cz, o.box.l, o.box.w, o.box.h, o.box.yaw);
            os << buf;
        }
    }
    if (!os) throw std::runtime_error("scenario: write failed: " + path);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("scenario: cannot open: " + path);
    std::string line;
    if (!std::getline(is, line) || line != "mottk-scenario v1") {
        throw std::runtime_error("scenario: bad header in " + path);
    }
    Scenario s;
    std::size_t frame_count = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "name") {
            ls >> s.name;
            if (s.name == "-") s.name.clear();
        } else if (tag == "framerate") {
            ls >> s.framerate;
        } else if (tag == "frames") {
            ls >> frame_count;
        } else if (tag == "frame") {
            std::size_t idx;
            Frame fr;
            ls >> idx >> fr.time >> fr.ego.x >> fr.ego.y >> fr.ego.z >> fr.ego.yaw;
            if (!ls || idx != s.frames.size()) {
                throw std::runtime_error("scenario: bad frame record at line " + std::to_string(lineno));
            }
            if (!s.frames.empty() && fr.time <= s.frames.back().time) {
                throw std::runtime_error("scenario: timestamps not increasing at line " +
                                         std::to_string(lineno));
            }
            s.frames.push_back(std::move(fr));
        } else if (tag == "obj") {
            if (s.frames.empty()) throw std::runtime_error("scenario: obj before frame at line " +
                                                           std::to_string(lineno));
            LabeledBox o;
            ls >> o.id >> o.box.cx >> o.box.cy >> o.box.cz >> o.box.l >> o.box.w >> o.box.h >> o.box.yaw;
            if (!ls) throw std::runtime_error("scenario: bad obj record at line " + std::to_string(lineno));
            s.frames.back().objects.push_back(o);
        } else {
            throw std::runtime_error("scenario: unknown record '" + tag + "' at line " +
                                     std::to_string(lineno));
        }
    }
    if (s.frames.size() != frame_count) {
        throw std::runtime_error("scenario: frame count mismatch in " + path);
    }
    return s;
}

} // namespace mot::data
