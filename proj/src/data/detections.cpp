#include "mot/data/detections.hpp"

#include <cmath>

namespace mot::data {

namespace {

int poisson(double lambda, core::Rng& rng) {
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

core::Tensor synth_appearance(int object_id, double noise, core::Rng& rng,
                              const AppearanceGeometry& geometry) {
    // identity-anchored base, independent of the observation stream
    core::Rng base_rng(0xA5EED5EEDULL ^ (static_cast<std::uint64_t>(object_id) * 0x9E3779B97F4A7C15ULL));
    core::Tensor t(geometry.shape());
    for (auto& v : t.v) v = static_cast<float>(base_rng.normal());
    if (noise > 0.0) {
        for (auto& v : t.v) v += static_cast<float>(noise * rng.normal());
    }
    return t;
}

std::vector<std::vector<Detection>> simulate_detections(const Scenario& scenario, const NoiseModel& noise,
                                                        std::uint64_t seed,
                                                        const AppearanceGeometry& geometry) {
    core::Rng rng(seed);
    std::vector<std::vector<Detection>> out;
    out.reserve(scenario.frames.size());
    const geom::Pose world{};

    for (const Frame& frame : scenario.frames) {
        std::vector<Detection> dets;
        for (const LabeledBox& obj : frame.objects) {
            if (rng.bernoulli(noise.fn_rate)) continue;
            geom::BoundingBox3D ego_box = geom::ego_compensate(obj.box, world, frame.ego);
            ego_box.cx += noise.pos_sigma * rng.normal();
            ego_box.cy += noise.pos_sigma * rng.normal();
            ego_box.cz += noise.pos_sigma * rng.normal();
            ego_box.l *= 1.0 + noise.dim_sigma * rng.normal();
            ego_box.w *= 1.0 + noise.dim_sigma * rng.normal();
            ego_box.h *= 1.0 + noise.dim_sigma * rng.normal();
            ego_box.l = std::max(0.2, ego_box.l);
            ego_box.w = std::max(0.2, ego_box.w);
            ego_box.h = std::max(0.2, ego_box.h);
            ego_box.yaw = geom::normalize_angle(ego_box.yaw + noise.yaw_sigma * rng.normal());
            if (!noise.clutter_region.contains(ego_box.cx, ego_box.cy)) continue;

            Detection d;
            d.box = ego_box;
            d.appearance = synth_appearance(obj.id, noise.appearance_sigma, rng, geometry);
            d.score = rng.uniform(0.8, 1.0);
            d.source_id = obj.id;
            dets.push_back(std::move(d));
        }
        const int clutter = poisson(noise.fp_rate, rng);
        for (int i = 0; i < clutter; ++i) {
            Detection d;
            d.box.cx = rng.uniform(noise.clutter_region.x_min, noise.clutter_region.x_max);
            d.box.cy = rng.uniform(noise.clutter_region.y_min, noise.clutter_region.y_max);
            d.box.l = rng.uniform(3.0, 5.0);
            d.box.w = rng.uniform(1.5, 2.1);
            d.box.h = rng.uniform(1.3, 1.9);
            d.box.cz = d.box.h / 2.0;
            d.box.yaw = rng.uniform(-3.141592653589793, 3.141592653589793);
            const int fake_id = 1000000 + static_cast<int>(rng.next_u64() % 1000000);
            d.appearance = synth_appearance(fake_id, noise.appearance_sigma, rng, geometry);
            d.score = rng.uniform(0.3, 0.8);
            d.source_id = -1;
            dets.push_back(std::move(d));
        }
        out.push_back(std::move(dets));
    }
    return out;
}

} // namespace mot::data
