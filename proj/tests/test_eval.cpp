#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "mot/eval/clearmot.hpp"

using namespace mot;
using eval::ClearMot;
using eval::FrameBoxes;
using eval::MotReport;
using geom::BoundingBox3D;

namespace {

BoundingBox3D at(double x, double y) { return {x, y, 0.0, 4.0, 2.0, 1.5, 0.0}; }

FrameBoxes frame(std::initializer_list<std::pair<int, BoundingBox3D>> objs) {
    FrameBoxes f;
    for (const auto& [id, b] : objs) f.add(id, b);
    return f;
}

} // namespace

TEST_CASE("identical box sets: perfect score") {
    ClearMot acc;
    acc.begin_sequence();
    for (int f = 0; f < 10; ++f) {
        const FrameBoxes gt = frame({{1, at(f, 0)}, {2, at(f, 10)}});
        const auto m = acc.match_frame(gt, gt);
        CHECK(m.pairs.size() == 2);
        CHECK(m.false_positives == 0);
        CHECK(m.false_negatives == 0);
    }
    const MotReport r = acc.report();
    CHECK(r.mota == doctest::Approx(100.0));
    CHECK(r.motp == doctest::Approx(100.0));
    CHECK(r.ids == 0);
    CHECK(r.frag == 0);
    CHECK(r.mt == doctest::Approx(100.0));
    CHECK(r.mt + r.pt + r.ml == doctest::Approx(100.0).epsilon(1e-4));
}

TEST_CASE("empty hypothesis set: everything is a miss") {
    ClearMot acc;
    acc.begin_sequence();
    const auto m = acc.match_frame(frame({{1, at(0, 0)}, {2, at(5, 5)}}), FrameBoxes{});
    CHECK(m.false_negatives == 2);
    CHECK(acc.report().fn == 2);
}

TEST_CASE("one FP in 100 GT boxes costs one MOTA point") {
    ClearMot acc;
    acc.begin_sequence();
    for (int f = 0; f < 50; ++f) {
        FrameBoxes gt = frame({{1, at(f, 0)}, {2, at(f, 10)}});
        FrameBoxes hyp = gt;
        if (f == 17) hyp.add(99, at(30, 30)); // one spurious hypothesis
        acc.match_frame(gt, hyp);
    }
    const MotReport r = acc.report();
    CHECK(r.gt_count == 100);
    CHECK(r.fp == 1);
    CHECK(r.mota == doctest::Approx(99.0));
}

TEST_CASE("a forced identity swap counts exactly one IDS") {
    ClearMot acc;
    acc.begin_sequence();
    acc.match_frame(frame({{1, at(0, 0)}}), frame({{10, at(0, 0)}}));
    acc.match_frame(frame({{1, at(1, 0)}}), frame({{10, at(1, 0)}}));
    const auto m = acc.match_frame(frame({{1, at(2, 0)}}), frame({{11, at(2, 0)}}));
    CHECK(m.id_switches == 1);
    acc.match_frame(frame({{1, at(3, 0)}}), frame({{11, at(3, 0)}}));
    CHECK(acc.report().ids == 1);
}

TEST_CASE("identity switches are remembered across gaps") {
    ClearMot acc;
    acc.begin_sequence();
    acc.match_frame(frame({{1, at(0, 0)}}), frame({{10, at(0, 0)}}));
    acc.match_frame(frame({{1, at(1, 0)}}), FrameBoxes{});                   // gap
    const auto m = acc.match_frame(frame({{1, at(2, 0)}}), frame({{11, at(2, 0)}}));
    CHECK(m.id_switches == 1);
}

TEST_CASE("fragmentation counts resumed interruptions") {
    ClearMot acc;
    acc.begin_sequence();
    acc.match_frame(frame({{1, at(0, 0)}}), frame({{10, at(0, 0)}}));
    acc.match_frame(frame({{1, at(1, 0)}}), FrameBoxes{});
    acc.match_frame(frame({{1, at(2, 0)}}), FrameBoxes{});
    acc.match_frame(frame({{1, at(3, 0)}}), frame({{10, at(3, 0)}})); // resumed: 1 FRAG
    acc.match_frame(frame({{1, at(4, 0)}}), FrameBoxes{});            // trailing holes are no FRAG
    const MotReport r = acc.report();
    CHECK(r.frag == 1);
    CHECK(r.ids == 0);
}

TEST_CASE("matching respects the distance threshold") {
    ClearMot acc(eval::MotConfig{1.0});
    acc.begin_sequence();
    const auto m = acc.match_frame(frame({{1, at(0, 0)}}), frame({{10, at(0, 1.5)}}));
    CHECK(m.pairs.empty());
    CHECK(m.false_positives == 1);
    CHECK(m.false_negatives == 1);
}

TEST_CASE("identity persistence wins over a marginally closer new hypothesis") {
    ClearMot acc;
    acc.begin_sequence();
    acc.match_frame(frame({{1, at(0, 0)}}), frame({{10, at(0, 0)}}));
    // hyp 11 is slightly closer, but 10 is still within the threshold
    const auto m = acc.match_frame(frame({{1, at(1, 0)}}), frame({{10, at(1.3, 0)}, {11, at(1.1, 0)}}));
    REQUIRE(m.pairs.size() == 1);
    CHECK(m.id_switches == 0);
    CHECK(acc.report().ids == 0);
}

TEST_CASE("scripted two-track scenario with hand-counted outcomes") {
    // Track A (id 1): present frames 0..9, tracked 0..3 and 6..9 (gap 4,5 -> 1 FRAG),
    //   hypothesis switches from 10 to 12 at frame 6 -> 1 IDS. Tracked 8/10 -> MT.
    // Track B (id 2): present frames 0..9, tracked only frame 0 and 1 -> ratio 0.2 -> ML.
    // Clutter hypothesis id 50 on frames 2,3 -> 2 FP.
    ClearMot acc;
    acc.begin_sequence();
    for (int f = 0; f < 10; ++f) {
        FrameBoxes gt = frame({{1, at(f, 0)}, {2, at(f, 20)}});
        FrameBoxes hyp;
        if (f <= 3) hyp.add(10, at(f, 0));
        if (f >= 6) hyp.add(12, at(f, 0));
        if (f <= 1) hyp.add(20, at(f, 20));
        if (f == 2 || f == 3) hyp.add(50, at(40, 40));
        acc.match_frame(gt, hyp);
    }
    const MotReport r = acc.report();
    CHECK(r.gt_count == 20);
    CHECK(r.fp == 2);
    CHECK(r.fn == 10); // A misses frames 4,5; B misses frames 2..9
    CHECK(r.ids == 1);
    CHECK(r.frag == 1);
    CHECK(r.gt_trajectories == 2);
    CHECK(r.mt == doctest::Approx(50.0));
    CHECK(r.ml == doctest::Approx(50.0));
    CHECK(r.pt == doctest::Approx(0.0));
    CHECK(r.mt + r.pt + r.ml == doctest::Approx(100.0).epsilon(1e-4));
    CHECK(r.mota == doctest::Approx(100.0 * (1.0 - 13.0 / 20.0)).epsilon(1e-9));
}

TEST_CASE("adding a perfectly matching hypothesis never lowers MOTA") {
    std::vector<std::vector<FrameBoxes>> gt(1), hyp_a(1), hyp_b(1);
    for (int f = 0; f < 10; ++f) {
        gt[0].push_back(frame({{1, at(f, 0)}, {2, at(f, 10)}}));
        hyp_a[0].push_back(frame({{10, at(f, 0)}}));
        auto with_extra = frame({{10, at(f, 0)}, {11, at(f, 10)}});
        hyp_b[0].push_back(with_extra);
    }
    const MotReport a = eval::evaluate_sequences(gt, hyp_a);
    const MotReport b = eval::evaluate_sequences(gt, hyp_b);
    CHECK(b.mota >= a.mota);
    // removing a hypothesis track can never increase FP
    CHECK(a.fp <= b.fp);
}

TEST_CASE("zero ground truth makes MOTA undefined") {
    ClearMot acc;
    acc.begin_sequence();
    acc.match_frame(FrameBoxes{}, frame({{10, at(0, 0)}}));
    const MotReport r = acc.report();
    CHECK(!r.mota_defined);
    CHECK(r.fp == 1);
}

TEST_CASE("report writers emit the metric set") {
    ClearMot acc;
    acc.begin_sequence();
    const FrameBoxes gt = frame({{1, at(0, 0)}});
    acc.match_frame(gt, gt);
    std::ostringstream txt, kv;
    eval::write_report(acc.report(), txt, "demo");
    eval::write_report_kv(acc.report(), kv);
    CHECK(txt.str().find("MOTA") != std::string::npos);
    CHECK(kv.str().find("MOTA=100.0000") != std::string::npos);
    CHECK(kv.str().find("FRAG=0") != std::string::npos);
}

TEST_CASE("evaluate_sequences rejects mismatched shapes") {
    std::vector<std::vector<FrameBoxes>> gt(2), hyp(1);
    CHECK_THROWS(eval::evaluate_sequences(gt, hyp));
}
