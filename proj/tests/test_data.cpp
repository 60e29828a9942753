#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mot/data/detections.hpp"
#include "mot/data/kitti.hpp"
#include "mot/data/scenario.hpp"

using namespace mot;
using core::Rng;
using core::Tensor;
using geom::BoundingBox3D;

namespace {

double cosine(const Tensor& a, const Tensor& b) {
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        num += static_cast<double>(a.v[i]) * b.v[i];
        na += static_cast<double>(a.v[i]) * a.v[i];
        nb += static_cast<double>(b.v[i]) * b.v[i];
    }
    return num / (std::sqrt(na) * std::sqrt(nb));
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("scenario generation is deterministic per seed") {
    data::ScenarioConfig cfg;
    cfg.num_frames = 30;
    const data::Scenario a = data::generate_scenario(cfg, 77);
    const data::Scenario b = data::generate_scenario(cfg, 77);
    const data::Scenario c = data::generate_scenario(cfg, 78);
    REQUIRE(a.frames.size() == b.frames.size());
    bool all_equal = true;
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        REQUIRE(a.frames[f].objects.size() == b.frames[f].objects.size());
        for (std::size_t o = 0; o < a.frames[f].objects.size(); ++o) {
            if (a.frames[f].objects[o].box.cx != b.frames[f].objects[o].box.cx) all_equal = false;
        }
    }
    CHECK(all_equal);
    // a different seed gives a different scene
    bool differs = a.frames[0].objects.size() != c.frames[0].objects.size();
    if (!differs && !a.frames[0].objects.empty()) {
        differs = a.frames[0].objects[0].box.cx != c.frames[0].objects[0].box.cx;
    }
    CHECK(differs);
}

TEST_CASE("zero objects produce empty frames") {
    data::ScenarioConfig cfg;
    cfg.objects_min = 0;
    cfg.objects_max = 0;
    cfg.num_frames = 5;
    const data::Scenario s = data::generate_scenario(cfg, 1);
    CHECK(s.frames.size() == 5);
    for (const auto& f : s.frames) CHECK(f.objects.empty());
}

TEST_CASE("a static object with a static ego repeats the same box") {
    data::ScenarioConfig cfg;
    cfg.objects_min = 1;
    cfg.objects_max = 1;
    cfg.speed_min = 0.0;
    cfg.speed_max = 0.0;
    cfg.yaw_rate_max = 0.0;
    cfg.num_frames = 10;
    const data::Scenario s = data::generate_scenario(cfg, 3);
    REQUIRE(!s.frames[0].objects.empty());
    const auto first = s.frames[0].objects[0].box;
    for (const auto& f : s.frames) {
        REQUIRE(f.objects.size() == 1);
        CHECK(f.objects[0].box.cx == first.cx);
        CHECK(f.objects[0].box.cy == first.cy);
        CHECK(f.objects[0].box.yaw == first.yaw);
    }
    // timestamps strictly increasing
    for (std::size_t f = 1; f < s.frames.size(); ++f) CHECK(s.frames[f].time > s.frames[f - 1].time);
}

TEST_CASE("zero-noise detections reproduce the ground truth") {
    data::ScenarioConfig cfg;
    cfg.num_frames = 8;
    const data::Scenario s = data::generate_scenario(cfg, 5);
    const auto dets = data::simulate_detections(s, data::NoiseModel{}, 9);
    REQUIRE(dets.size() == s.frames.size());
    for (std::size_t f = 0; f < dets.size(); ++f) {
        REQUIRE(dets[f].size() == s.frames[f].objects.size());
        for (std::size_t j = 0; j < dets[f].size(); ++j) {
            CHECK(dets[f][j].box.cx == doctest::Approx(s.frames[f].objects[j].box.cx).epsilon(1e-12));
            CHECK(dets[f][j].source_id == s.frames[f].objects[j].id);
        }
    }
}

TEST_CASE("FN rate 1 drops everything") {
    data::ScenarioConfig cfg;
    cfg.num_frames = 5;
    const data::Scenario s = data::generate_scenario(cfg, 6);
    data::NoiseModel noise;
    noise.fn_rate = 1.0;
    for (const auto& frame : data::simulate_detections(s, noise, 10)) CHECK(frame.empty());
}

TEST_CASE("FN rate is honored within a 3-sigma binomial bound") {
    data::ScenarioConfig cfg;
    cfg.num_frames = 1500;
    cfg.objects_min = 8;
    cfg.objects_max = 8;
    cfg.speed_min = 0.0;
    cfg.speed_max = 0.0; // keep everyone inside the region
    const data::Scenario s = data::generate_scenario(cfg, 11);
    std::int64_t total = 0;
    for (const auto& f : s.frames) total += static_cast<std::int64_t>(f.objects.size());
    REQUIRE(total >= 10000);

    data::NoiseModel noise;
    noise.fn_rate = 0.2;
    std::int64_t kept = 0;
    for (const auto& f : data::simulate_detections(s, noise, 12)) kept += static_cast<std::int64_t>(f.size());
    const double dropped = static_cast<double>(total - kept);
    const double sigma = std::sqrt(static_cast<double>(total) * 0.2 * 0.8);
    CHECK(std::abs(dropped - 0.2 * static_cast<double>(total)) <= 3.0 * sigma);
}

TEST_CASE("detections never leave the configured region") {
    data::ScenarioConfig cfg;
    cfg.num_frames = 50;
    const data::Scenario s = data::generate_scenario(cfg, 13);
    data::NoiseModel noise;
    noise.pos_sigma = 2.0; // aggressive jitter
    noise.fp_rate = 3.0;
    for (const auto& frame : data::simulate_detections(s, noise, 14)) {
        for (const auto& d : frame) {
            CHECK(noise.clutter_region.contains(d.box.cx, d.box.cy));
        }
    }
}

TEST_CASE("synthetic appearance: identity anchoring and separation") {
    Rng rng(15);
    const Tensor a0 = data::synth_appearance(7, 0.0, rng);
    const Tensor a1 = data::synth_appearance(7, 0.0, rng);
    CHECK(a0.v == a1.v); // noise 0: identical
    const Tensor b = data::synth_appearance(8, 0.0, rng);
    CHECK(cosine(a0, b) < 1.0);

    // separation at noise 0.1 over 1000 samples
    double same_sum = 0.0, cross_sum = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int id_a = i % 20, id_b = (i * 7 + 3) % 20;
        const Tensor x = data::synth_appearance(id_a, 0.1, rng);
        const Tensor y = data::synth_appearance(id_a, 0.1, rng);
        same_sum += cosine(x, y);
        if (id_a != id_b) {
            const Tensor z = data::synth_appearance(id_b, 0.1, rng);
            cross_sum += cosine(x, z);
        }
    }
    CHECK(same_sum / 1000.0 - cross_sum / 1000.0 > 0.3);
}

TEST_CASE("BEV IoU basics") {
    const BoundingBox3D a{0, 0, 0, 1, 1, 1, 0};
    CHECK(geom::iou_bev(a, a) == doctest::Approx(1.0));
    const BoundingBox3D far{10, 10, 0, 1, 1, 1, 0};
    CHECK(geom::iou_bev(a, far) == doctest::Approx(0.0));
    // unit squares overlapping by half: I = 0.5, U = 1.5
    const BoundingBox3D half{0.5, 0, 0, 1, 1, 1, 0};
    CHECK(geom::iou_bev(a, half) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("KITTI records: hand-written line round trips") {
    {
        std::ofstream os("kitti_test.txt");
        os << "0 3 Car 0.100000 1 -1.570000 100.0 120.5 220.0 260.25 1.500000 1.800000 4.200000 "
              "2.500000 1.200000 15.750000 0.030000 0.900000\n";
        os << "1 3 Car 0.000000 0 0.000000 0.0 0.0 0.0 0.0 1.500000 1.800000 4.200000 2.600000 "
              "1.210000 15.500000 0.040000\n";
    }
    const auto records = data::parse_kitti_records("kitti_test.txt");
    REQUIRE(records.size() == 2);
    CHECK(records[0].frame == 0);
    CHECK(records[0].track_id == 3);
    CHECK(records[0].type == "Car");
    CHECK(records[0].occluded == 1);
    CHECK(records[0].height == doctest::Approx(1.5));
    CHECK(records[0].width == doctest::Approx(1.8));
    CHECK(records[0].length == doctest::Approx(4.2));
    CHECK(records[0].x == doctest::Approx(2.5));
    CHECK(records[0].has_score);
    CHECK(records[0].score == doctest::Approx(0.9));
    CHECK(!records[1].has_score);
    const auto box = records[0].box();
    CHECK(box.l == doctest::Approx(4.2));
    CHECK(box.h == doctest::Approx(1.5));

    // write(parse(f)) is stable at the printed precision
    data::write_kitti_records(records, "kitti_test_2.txt");
    const auto again = data::parse_kitti_records("kitti_test_2.txt");
    data::write_kitti_records(again, "kitti_test_3.txt");
    CHECK(slurp("kitti_test_2.txt") == slurp("kitti_test_3.txt"));
    CHECK(!slurp("kitti_test_2.txt").empty());
    std::remove("kitti_test.txt");
    std::remove("kitti_test_2.txt");
    std::remove("kitti_test_3.txt");
}

TEST_CASE("KITTI parser rejects malformed and out-of-order input") {
    {
        std::ofstream os("kitti_bad.txt");
        os << "0 1 Car 0 0 0 0 0 0 0 1.5 1.8\n"; // truncated line
    }
    CHECK_THROWS_WITH_AS(data::parse_kitti_records("kitti_bad.txt"), doctest::Contains("line 1"),
                         std::runtime_error);
    {
        std::ofstream os("kitti_bad.txt");
        os << "3 1 Car 0 0 0 0 0 0 0 1.5 1.8 4.2 0 0 10 0\n";
        os << "2 1 Car 0 0 0 0 0 0 0 1.5 1.8 4.2 0 0 10 0\n";
    }
    CHECK_THROWS_WITH_AS(data::parse_kitti_records("kitti_bad.txt"), doctest::Contains("out-of-order"),
                         std::runtime_error);
    std::remove("kitti_bad.txt");
    CHECK_THROWS(data::parse_kitti_records("kitti_missing.txt"));
}

TEST_CASE("empty label file gives an empty scenario") {
    { std::ofstream os("kitti_empty.txt"); }
    const auto s = data::parse_kitti_labels("kitti_empty.txt");
    CHECK(s.frames.empty());
    std::remove("kitti_empty.txt");
}

TEST_CASE("class filtering keeps only the requested types") {
    {
        std::ofstream os("kitti_types.txt");
        os << "0 1 Car 0 0 0 0 0 0 0 1.5 1.8 4.2 0 0 10 0\n";
        os << "0 2 Pedestrian 0 0 0 0 0 0 0 1.7 0.6 0.6 2 0 8 0\n";
        os << "0 3 DontCare 0 0 0 0 0 0 0 0 0 0 0 0 0 0\n";
    }
    const auto s = data::parse_kitti_labels("kitti_types.txt");
    REQUIRE(s.frames.size() == 1);
    CHECK(s.frames[0].objects.size() == 1);
    CHECK(s.frames[0].objects[0].id == 1);
    const auto both = data::scenario_from_records(data::parse_kitti_records("kitti_types.txt"),
                                                  {"Car", "Pedestrian"});
    CHECK(both.frames[0].objects.size() == 2);
    std::remove("kitti_types.txt");
}

TEST_CASE("ego poses: parse, count mismatch, compensation variance on a circle") {
    {
        std::ofstream os("poses_test.txt");
        os << "0.0 0.0 0.0 0.0\n1.0 2.0 0.0 0.1\n";
    }
    const auto poses = data::parse_ego_poses("poses_test.txt");
    REQUIRE(poses.size() == 2);
    CHECK(poses[1].y == doctest::Approx(2.0));
    std::remove("poses_test.txt");

    data::Scenario s;
    s.frames.resize(3);
    CHECK_THROWS(data::apply_ego_poses(s, poses));

    // a static world point observed from a circular ego path compensates to
    // a constant world coordinate
    const double radius = 20.0;
    const BoundingBox3D world_box{5.0, 30.0, 0.5, 4, 2, 1.5, 0.7};
    double mean_x = 0.0, mean_y = 0.0;
    std::vector<BoundingBox3D> back;
    for (int k = 0; k < 50; ++k) {
        const double a = 2.0 * 3.141592653589793 * k / 50.0;
        const geom::Pose ego{radius * std::cos(a), radius * std::sin(a), 0.0, a + 1.5707963267948966};
        const BoundingBox3D in_ego = geom::ego_compensate(world_box, geom::Pose{}, ego);
        back.push_back(geom::ego_compensate(in_ego, ego, geom::Pose{}));
        mean_x += back.back().cx;
        mean_y += back.back().cy;
    }
    mean_x /= 50.0;
    mean_y /= 50.0;
    double var = 0.0;
    for (const auto& b : back) {
        var += (b.cx - mean_x) * (b.cx - mean_x) + (b.cy - mean_y) * (b.cy - mean_y);
    }
    var /= 50.0;
    CHECK(var < 1e-6);
    CHECK(mean_x == doctest::Approx(world_box.cx).epsilon(1e-9));
}

TEST_CASE("scenario text format round trips") {
    data::ScenarioConfig cfg;
    cfg.num_frames = 12;
    cfg.ego_motion = true;
    cfg.ego_speed = 2.0;
    data::Scenario s = data::generate_scenario(cfg, 21);
    s.name = "roundtrip";
    data::save_scenario(s, "scenario_rt.txt");
    const data::Scenario back = data::load_scenario("scenario_rt.txt");
    REQUIRE(back.frames.size() == s.frames.size());
    CHECK(back.name == s.name);
    for (std::size_t f = 0; f < s.frames.size(); ++f) {
        REQUIRE(back.frames[f].objects.size() == s.frames[f].objects.size());
        CHECK(back.frames[f].ego.y == doctest::Approx(s.frames[f].ego.y).epsilon(1e-6));
        for (std::size_t o = 0; o < s.frames[f].objects.size(); ++o) {
            CHECK(back.frames[f].objects[o].id == s.frames[f].objects[o].id);
            CHECK(back.frames[f].objects[o].box.cx ==
                  doctest::Approx(s.frames[f].objects[o].box.cx).epsilon(1e-6));
        }
    }
    // save(load(x)) is byte-stable
    data::save_scenario(back, "scenario_rt2.txt");
    CHECK(slurp("scenario_rt.txt") == slurp("scenario_rt2.txt"));
    std::remove("scenario_rt.txt");
    std::remove("scenario_rt2.txt");

    {
        std::ofstream os("scenario_bad.txt");
        os << "not-a-scenario\n";
    }
    CHECK_THROWS(data::load_scenario("scenario_bad.txt"));
    std::remove("scenario_bad.txt");
}
