#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "mot/sim/pairs.hpp"
#include "mot/sim/similarity_map.hpp"
#include "mot/sim/simnet.hpp"

using namespace mot;
using core::Rng;
using core::Tensor;
using geom::BoundingBox3D;
using geom::Pose;

namespace {

sim::SimNetConfig tiny_config() {
    sim::SimNetConfig cfg;
    cfg.feature_dim = 16;
    cfg.bbox_conv_filters = 12;
    cfg.app_conv_filters = 8;
    cfg.appearance = {5, 5, 4};
    return cfg;
}

sim::SimNet tiny_net(std::uint64_t seed = 3) {
    Rng rng(seed);
    sim::SimNet net = sim::SimNet::init(tiny_config(), rng);
    net.mark_bn_initialized();
    return net;
}

std::vector<Tensor> random_apps(int k, const data::AppearanceGeometry& g, Rng& rng) {
    std::vector<Tensor> out;
    for (int i = 0; i < k; ++i) out.push_back(Tensor::uniform(g.shape(), rng));
    return out;
}

data::Detection det_at(double x, double y, double score = 1.0, int source = -1) {
    data::Detection d;
    d.box = BoundingBox3D{x, y, 0.8, 4.2, 1.8, 1.6, 0.2};
    d.appearance = Tensor::zeros({5, 5, 4});
    d.score = score;
    d.source_id = source;
    return d;
}

// embeddings with hand-picked unit features and importance rows
sim::Embeddings manual_embeddings(const std::vector<std::vector<float>>& bbox_rows,
                                  const std::vector<std::vector<float>>& app_rows,
                                  const std::vector<std::pair<float, float>>& importance) {
    const int k = static_cast<int>(bbox_rows.size());
    const int f = static_cast<int>(bbox_rows[0].size());
    sim::Embeddings e;
    e.bbox_feat = Tensor({k, f});
    e.app_feat = Tensor({k, f});
    e.importance = Tensor({k, 2});
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < f; ++j) {
            e.bbox_feat.at2(i, j) = bbox_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            e.app_feat.at2(i, j) = app_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        e.importance.at2(i, 0) = importance[static_cast<std::size_t>(i)].first;
        e.importance.at2(i, 1) = importance[static_cast<std::size_t>(i)].second;
    }
    return e;
}

} // namespace

TEST_CASE("branch outputs are unit features") {
    sim::SimNet net = tiny_net();
    Rng rng(11);
    std::vector<BoundingBox3D> boxes;
    for (int i = 0; i < 6; ++i) {
        boxes.push_back({rng.uniform(-30, 30), rng.uniform(5, 70), 0.8, 4.5, 1.8, 1.5, rng.uniform(-3, 3)});
    }
    const sim::Embeddings emb = sim::embed_objects(net, boxes, random_apps(6, net.cfg.appearance, rng));
    for (int i = 0; i < 6; ++i) {
        double nb = 0.0, na = 0.0;
        for (int j = 0; j < net.cfg.feature_dim; ++j) {
            nb += static_cast<double>(emb.bbox_feat.at2(i, j)) * emb.bbox_feat.at2(i, j);
            na += static_cast<double>(emb.app_feat.at2(i, j)) * emb.app_feat.at2(i, j);
        }
        CHECK(std::sqrt(nb) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(std::sqrt(na) == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(emb.importance.at2(i, 0) + emb.importance.at2(i, 1) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(emb.importance.at2(i, 0) >= 0.f);
        CHECK(emb.importance.at2(i, 1) >= 0.f);
    }
}

TEST_CASE("identical objects produce identical features and cosine 1") {
    sim::SimNet net = tiny_net();
    Rng rng(12);
    const BoundingBox3D box{3.0, 20.0, 0.8, 4.4, 1.8, 1.5, 0.3};
    const Tensor app = Tensor::uniform(net.cfg.appearance.shape(), rng);
    const sim::Embeddings emb = sim::embed_objects(net, {box, box}, {app, app});
    for (int j = 0; j < net.cfg.feature_dim; ++j) {
        CHECK(emb.bbox_feat.at2(0, j) == emb.bbox_feat.at2(1, j));
        CHECK(emb.app_feat.at2(0, j) == emb.app_feat.at2(1, j));
    }
    CHECK(sim::pair_similarity(emb, 0, emb, 1) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("embedding an empty object list is fine") {
    sim::SimNet net = tiny_net();
    const sim::Embeddings emb = sim::embed_objects(net, {}, {});
    CHECK(emb.count() == 0);
}

TEST_CASE("appearance branch rejects geometry mismatches") {
    sim::SimNet net = tiny_net();
    CHECK_THROWS(sim::embed_objects(net, {BoundingBox3D{}}, {Tensor::zeros({3, 3, 4})}));
}

TEST_CASE("zero importance logits give equal weights") {
    sim::SimNet net = tiny_net();
    for (auto& v : net.imp_fc.w.value.v) v = 0.f;
    for (auto& v : net.imp_fc.b.value.v) v = 0.f;
    Rng rng(13);
    const sim::Embeddings emb =
        sim::embed_objects(net, {BoundingBox3D{1, 10, 0, 4, 2, 1.5, 0}}, random_apps(1, net.cfg.appearance, rng));
    CHECK(emb.importance.at2(0, 0) == doctest::Approx(0.5));
    CHECK(emb.importance.at2(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("pair similarity combines branch cosines with importance weights") {
    // crafted unit features: bbox cosine 0.8, appearance cosine 0.4
    const float s = std::sqrt(0.5f);
    auto e = manual_embeddings({{1, 0, 0, 0}, {0.8f, 0.6f, 0, 0}}, {{1, 0, 0, 0}, {0.4f, std::sqrt(1 - 0.16f), 0, 0}},
                               {{0.75f, 0.25f}, {0.75f, 0.25f}});
    (void)s;
    CHECK(sim::pair_similarity(e, 0, e, 1) == doctest::Approx(0.75 * 0.8 + 0.25 * 0.4).epsilon(1e-6));
    CHECK(sim::pair_similarity(e, 0, e, 1) == doctest::Approx(0.7).epsilon(1e-6));

    // w_bbox = 1: similarity equals the bbox cosine
    auto e2 = manual_embeddings({{1, 0, 0, 0}, {0.8f, 0.6f, 0, 0}}, {{1, 0, 0, 0}, {0, 1, 0, 0}},
                                {{1.f, 0.f}, {1.f, 0.f}});
    CHECK(sim::pair_similarity(e2, 0, e2, 1) == doctest::Approx(0.8).epsilon(1e-6));

    // both cosines equal c: similarity c regardless of the weights
    auto e3 = manual_embeddings({{1, 0, 0, 0}, {0.6f, 0.8f, 0, 0}}, {{0, 1, 0, 0}, {0.8f, 0.6f, 0, 0}},
                                {{0.3f, 0.7f}, {0.9f, 0.1f}});
    CHECK(sim::pair_similarity(e3, 0, e3, 1) == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("pair similarity stays in [-1,1]") {
    sim::SimNet net = tiny_net();
    Rng rng(14);
    std::vector<BoundingBox3D> boxes;
    for (int i = 0; i < 8; ++i) {
        boxes.push_back({rng.uniform(-35, 35), rng.uniform(2, 75), 0.8, 4.5, 1.8, 1.5, rng.uniform(-3, 3)});
    }
    const sim::Embeddings emb = sim::embed_objects(net, boxes, random_apps(8, net.cfg.appearance, rng));
    for (int i = 0; i < 4; ++i)
        for (int j = 4; j < 8; ++j) {
            const double y = sim::pair_similarity(emb, i, emb, j);
            CHECK(y <= 1.0 + 1e-6);
            CHECK(y >= -1.0 - 1e-6);
        }
}

// ---------------------------------------------------------------------------
// similarity maps
// ---------------------------------------------------------------------------

TEST_CASE("grid geometry: boundary cells and sizes") {
    sim::GridGeometry g;
    CHECK(g.cols() == 160);
    CHECK(g.rows() == 160);
    CHECK(g.local_size() == 21);
    const sim::Cell c = g.cell_of(-40.0, 0.0);
    CHECK(c.ix == 0);
    CHECK(c.iy == 0);
    CHECK(!g.cell_of(40.0, 10.0).valid());  // x_max exclusive
    CHECK(g.cell_of(39.99, 79.99).ix == 159);
}

TEST_CASE("occupancy: collision keeps the higher detector score") {
    sim::GridGeometry g;
    std::vector<data::Detection> dets = {det_at(0.1, 10.1, 0.5), det_at(0.2, 10.2, 0.9),
                                         det_at(-40.0, 0.0, 1.0)};
    const sim::OccupancyGrid occ = sim::build_occupancy(g, dets);
    CHECK(occ.collisions == 1);
    CHECK(!occ.det_cells[0].valid()); // lost the cell
    CHECK(occ.det_cells[1].valid());
    CHECK(occ.at(occ.det_cells[1]) == 1);
    CHECK(occ.det_cells[2].ix == 0);
    CHECK(occ.det_cells[2].iy == 0);
}

TEST_CASE("global map: no detections means an all-zero map") {
    sim::GridGeometry g;
    const sim::OccupancyGrid occ = sim::build_occupancy(g, {});
    sim::SimNet net = tiny_net();
    const sim::Embeddings none;
    const sim::SimNetScorer scorer(none, none);
    const sim::GlobalSimilarityMap map = sim::build_global_map(g, occ, scorer, 0);
    for (float v : map.scores) CHECK(v == 0.f);
}

TEST_CASE("selective global map equals the dense convolution reference") {
    sim::SimNet net = tiny_net();
    Rng rng(15);
    for (int scene = 0; scene < 5; ++scene) {
        const int n = rng.uniform_int(1, 4), m = rng.uniform_int(0, 12);
        std::vector<BoundingBox3D> tboxes;
        for (int i = 0; i < n; ++i) {
            tboxes.push_back({rng.uniform(-39, 39), rng.uniform(1, 79), 0.8, 4.4, 1.8, 1.5, 0.1});
        }
        std::vector<data::Detection> dets;
        for (int j = 0; j < m; ++j) {
            auto d = det_at(rng.uniform(-39, 39), rng.uniform(1, 79), rng.uniform(0.3, 1.0));
            d.appearance = Tensor::uniform(net.cfg.appearance.shape(), rng);
            dets.push_back(std::move(d));
        }
        const sim::Embeddings temb = sim::embed_objects(net, tboxes, random_apps(n, net.cfg.appearance, rng));
        std::vector<BoundingBox3D> dboxes;
        std::vector<Tensor> dapps;
        for (const auto& d : dets) {
            dboxes.push_back(d.box);
            dapps.push_back(d.appearance);
        }
        const sim::Embeddings demb = sim::embed_objects(net, dboxes, dapps);
        const sim::OccupancyGrid occ = sim::build_occupancy(sim::GridGeometry{}, dets);
        const sim::SimNetScorer scorer(temb, demb);
        for (int t = 0; t < n; ++t) {
            const auto fast = sim::build_global_map(sim::GridGeometry{}, occ, scorer, t);
            const auto dense = sim::build_global_map_dense(sim::GridGeometry{}, occ, temb, demb, t);
            REQUIRE(fast.scores.size() == dense.scores.size());
            for (std::size_t i = 0; i < fast.scores.size(); ++i) {
                CHECK(fast.scores[i] == doctest::Approx(dense.scores[i]).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("occupied map cells equal pair_similarity directly") {
    sim::SimNet net = tiny_net();
    Rng rng(16);
    std::vector<data::Detection> dets;
    for (int j = 0; j < 6; ++j) {
        auto d = det_at(rng.uniform(-30, 30), rng.uniform(5, 70));
        d.appearance = Tensor::uniform(net.cfg.appearance.shape(), rng);
        dets.push_back(std::move(d));
    }
    const sim::Embeddings temb = sim::embed_objects(net, {BoundingBox3D{0, 40, 0.8, 4.4, 1.8, 1.5, 0}},
                                                    random_apps(1, net.cfg.appearance, rng));
    std::vector<BoundingBox3D> dboxes;
    std::vector<Tensor> dapps;
    for (const auto& d : dets) {
        dboxes.push_back(d.box);
        dapps.push_back(d.appearance);
    }
    const sim::Embeddings demb = sim::embed_objects(net, dboxes, dapps);
    const sim::OccupancyGrid occ = sim::build_occupancy(sim::GridGeometry{}, dets);
    const sim::SimNetScorer scorer(temb, demb);
    const auto map = sim::build_global_map(sim::GridGeometry{}, occ, scorer, 0);
    for (std::size_t j = 0; j < dets.size(); ++j) {
        if (!occ.det_cells[j].valid()) continue;
        CHECK(map.at(occ.det_cells[j]) ==
              doctest::Approx(sim::pair_similarity(temb, 0, demb, static_cast<int>(j))).epsilon(1e-6));
    }
}

TEST_CASE("local crop: center, corner and index arithmetic") {
    sim::GridGeometry g;
    sim::GlobalSimilarityMap global;
    global.geom = g;
    global.scores.assign(static_cast<std::size_t>(g.rows()) * g.cols(), 0.f);
    // fill with a recognizable pattern
    for (int iy = 0; iy < g.rows(); ++iy)
        for (int ix = 0; ix < g.cols(); ++ix)
            global.scores[static_cast<std::size_t>(iy) * g.cols() + ix] =
                static_cast<float>(iy * 1000 + ix) / 1e6f;

    // center crop equals the sub-block
    const sim::Cell center{80, 80};
    const auto local = sim::crop_local_map(global, center);
    for (int ly = 0; ly < 21; ++ly)
        for (int lx = 0; lx < 21; ++lx) {
            CHECK(local.at(lx, ly) == global.scores[static_cast<std::size_t>(70 + ly) * g.cols() + 70 + lx]);
        }

    // corner crop: three quadrants zero-padded
    const auto corner = sim::crop_local_map(global, sim::Cell{0, 0});
    for (int ly = 0; ly < 21; ++ly)
        for (int lx = 0; lx < 21; ++lx) {
            if (lx < 10 || ly < 10) {
                CHECK(corner.at(lx, ly) == 0.f);
            } else {
                CHECK(corner.at(lx, ly) ==
                      global.scores[static_cast<std::size_t>(ly - 10) * g.cols() + (lx - 10)]);
            }
        }
    CHECK_THROWS(sim::crop_local_map(global, sim::Cell{-1, 5}));
}

TEST_CASE("detection 2 m ahead of the target lands at local cell (10,14)") {
    sim::GridGeometry g;
    sim::SimNet net = tiny_net();
    Rng rng(17);
    const BoundingBox3D target{0.1, 40.1, 0.8, 4.4, 1.8, 1.5, 0};
    std::vector<data::Detection> dets = {det_at(0.1, 42.1)};
    dets[0].appearance = Tensor::uniform(net.cfg.appearance.shape(), rng);
    const sim::Embeddings temb = sim::embed_objects(net, {target}, random_apps(1, net.cfg.appearance, rng));
    const sim::Embeddings demb = sim::embed_objects(net, {dets[0].box}, {dets[0].appearance});
    const sim::OccupancyGrid occ = sim::build_occupancy(g, dets);
    const sim::SimNetScorer scorer(temb, demb);
    const auto global = sim::build_global_map(g, occ, scorer, 0);
    const auto local = sim::crop_local_map(global, g.cell_of(target.cx, target.cy));
    const double expect = sim::pair_similarity(temb, 0, demb, 0);
    CHECK(local.at(10, 14) == doctest::Approx(expect).epsilon(1e-6));
    // crop preserves values: every nonzero local cell equals its source global cell
    for (int ly = 0; ly < 21; ++ly)
        for (int lx = 0; lx < 21; ++lx) {
            if (local.at(lx, ly) == 0.f) continue;
            const sim::Cell gcell{local.origin.ix + lx, local.origin.iy + ly};
            CHECK(local.at(lx, ly) == global.at(gcell));
        }
}

// ---------------------------------------------------------------------------
// loss and weights
// ---------------------------------------------------------------------------

TEST_CASE("simnet loss basics") {
    core::Tape tape;
    auto yhat = tape.constant(Tensor({1}, {1.f}));
    CHECK(core::Tape::Id(yhat) >= 0);
    CHECK(tape.val(sim::simnet_loss(tape, yhat, {1}, {1.0})).v[0] == doctest::Approx(0.0));

    core::Tape tape2;
    auto yhat2 = tape2.constant(Tensor({1}, {1.f}));
    CHECK(tape2.val(sim::simnet_loss(tape2, yhat2, {-1}, {1.0})).v[0] == doctest::Approx(2.0));

    // all-zero weights: loss defined as 0
    core::Tape tape3;
    auto yhat3 = tape3.constant(Tensor({2}, {0.3f, -0.7f}));
    CHECK(tape3.val(sim::simnet_loss(tape3, yhat3, {1, -1}, {0.0, 0.0})).v[0] == 0.0);
}

TEST_CASE("simnet loss equals a hand-evaluated batch") {
    // four pairs evaluated by hand: L = (1/N+) sum w*(1 - y*yhat)
    const std::vector<int> labels = {1, -1, 1, -1};
    const std::vector<float> yhat_v = {0.9f, -0.2f, 0.1f, 0.8f};
    const std::vector<double> weights = {0.5, 1.25, 2.0, 0.0};
    // contributions: 0.5*(1-0.9)=0.05; 1.25*(1-0.2)=1.0; 2*(1-0.1)=1.8; excluded
    // N+ = 3 -> L = 2.85/3 = 0.95
    core::Tape tape;
    auto yhat = tape.constant(Tensor({4}, yhat_v));
    CHECK(tape.val(sim::simnet_loss(tape, yhat, labels, weights)).v[0] == doctest::Approx(0.95).epsilon(1e-6));
}

TEST_CASE("skew and cost weights") {
    // balanced batch: w_skew = 1 for everyone
    {
        const std::vector<int> labels = {1, 1, -1, -1};
        const std::vector<double> yhat = {0.0, 0.0, 0.0, 0.0};
        const auto w = sim::skew_and_cost_weights(labels, yhat, 2.0, 1e-3);
        for (double v : w) CHECK(v == doctest::Approx(0.25)); // w_skew=1, w_cost=(1/2)^2
    }
    // perfectly easy positive contributes nothing
    {
        int n_plus = -1;
        const auto w = sim::skew_and_cost_weights({1}, {1.0}, 2.0, 1e-3, &n_plus);
        CHECK(w[0] == 0.0);
        CHECK(n_plus == 0);
    }
    // 18 negatives : 25 positives -> w_skew(pos)=43/50, w_skew(neg)=43/36
    {
        std::vector<int> labels;
        std::vector<double> yhat;
        for (int i = 0; i < 25; ++i) labels.push_back(1), yhat.push_back(-1.0); // hard: w_cost = 1
        for (int i = 0; i < 18; ++i) labels.push_back(-1), yhat.push_back(1.0);
        const auto w = sim::skew_and_cost_weights(labels, yhat, 2.0, 1e-3);
        CHECK(w[0] == doctest::Approx(43.0 / 50.0).epsilon(1e-9));
        CHECK(w[30] == doctest::Approx(43.0 / 36.0).epsilon(1e-9));
    }
    CHECK_THROWS(sim::skew_and_cost_weights({0}, {0.0}, 2.0, 1e-3));
}

// ---------------------------------------------------------------------------
// ego compensation
// ---------------------------------------------------------------------------

TEST_CASE("ego compensation: identity, rotation, composition") {
    const BoundingBox3D box{3.0, 5.0, 1.0, 4.0, 2.0, 1.5, 0.4};
    const Pose same{2.0, -1.0, 0.5, 0.7};
    const auto id_box = geom::ego_compensate(box, same, same);
    CHECK(id_box.cx == doctest::Approx(box.cx).epsilon(1e-12));
    CHECK(id_box.cy == doctest::Approx(box.cy).epsilon(1e-12));
    CHECK(id_box.yaw == doctest::Approx(box.yaw).epsilon(1e-12));

    // pure 90-degree ego rotation
    const double half_pi = 1.5707963267948966;
    const auto rot = geom::ego_compensate(box, Pose{0, 0, 0, 0}, Pose{0, 0, 0, half_pi});
    CHECK(rot.cx == doctest::Approx(box.cy).epsilon(1e-9));
    CHECK(rot.cy == doctest::Approx(-box.cx).epsilon(1e-9));
    CHECK(rot.yaw == doctest::Approx(box.yaw - half_pi).epsilon(1e-9));
    CHECK(rot.l == box.l);

    // compose(A->B, B->C) equals direct A->C
    Rng rng(18);
    for (int trial = 0; trial < 50; ++trial) {
        const Pose a{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-1, 1), rng.uniform(-3, 3)};
        const Pose b{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-1, 1), rng.uniform(-3, 3)};
        const Pose c{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-1, 1), rng.uniform(-3, 3)};
        const BoundingBox3D x{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1, 1), 4, 2, 1.5,
                              rng.uniform(-3, 3)};
        const auto via = geom::ego_compensate(geom::ego_compensate(x, a, b), b, c);
        const auto direct = geom::ego_compensate(x, a, c);
        CHECK(via.cx == doctest::Approx(direct.cx).epsilon(1e-9));
        CHECK(via.cy == doctest::Approx(direct.cy).epsilon(1e-9));
        CHECK(via.cz == doctest::Approx(direct.cz).epsilon(1e-9));
        CHECK(std::abs(geom::normalize_angle(via.yaw - direct.yaw)) < 1e-9);
    }
}

// ---------------------------------------------------------------------------
// training pairs
// ---------------------------------------------------------------------------

namespace {

data::Scenario two_frame_scenario() {
    data::Scenario s;
    s.framerate = 10;
    for (int f = 0; f < 6; ++f) {
        data::Frame frame;
        frame.time = f * 0.1;
        for (int id = 0; id < 4; ++id) {
            const double x = -20.0 + id * 12.0 + f * 0.12;
            frame.objects.push_back({id, BoundingBox3D{x, 20.0 + 3.0 * id, 0.8, 4.4, 1.8, 1.5, 0.1}});
        }
        s.frames.push_back(std::move(frame));
    }
    return s;
}

} // namespace

TEST_CASE("pair generation: unjittered ground truth is a positive, duplicates rejected") {
    sim::PairGenConfig cfg;
    cfg.appearance = {5, 5, 4};
    cfg.jitter_pos_sigma = 0.0;
    cfg.jitter_dim_sigma = 0.0;
    cfg.jitter_yaw_sigma = 0.0;
    cfg.proposals_per_object = 3; // identical proposals, only the first survives diversity
    cfg.negatives_per_positive = 0.0;
    const auto pairs = sim::generate_training_pairs(two_frame_scenario(), cfg, 99);
    REQUIRE(!pairs.empty());
    for (const auto& p : pairs) CHECK(p.label == 1);
    // 4 objects x 5 frame gaps, exactly one proposal each (IoU 1.0 > 0.95 kills the rest)
    CHECK(pairs.size() == 20);
}

TEST_CASE("pair generation: class ratio tracks negatives_per_positive") {
    sim::PairGenConfig cfg;
    cfg.appearance = {5, 5, 4};
    const auto pairs = sim::generate_training_pairs(two_frame_scenario(), cfg, 7);
    std::size_t pos = 0, neg = 0;
    for (const auto& p : pairs) (p.label == 1 ? pos : neg)++;
    REQUIRE(pos > 0);
    const double ratio = static_cast<double>(neg) / static_cast<double>(pos);
    CHECK(ratio > 0.72 * 0.8);
    CHECK(ratio < 0.72 * 1.2);
}

TEST_CASE("pair generation is deterministic per seed") {
    sim::PairGenConfig cfg;
    cfg.appearance = {5, 5, 4};
    const auto a = sim::generate_training_pairs(two_frame_scenario(), cfg, 31);
    const auto b = sim::generate_training_pairs(two_frame_scenario(), cfg, 31);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].detection_box.cx == b[i].detection_box.cx);
        CHECK(a[i].target_app.v == b[i].target_app.v);
    }
    CHECK_THROWS(sim::generate_training_pairs(data::Scenario{}, cfg, 1));
}

TEST_CASE("pair dataset round trip") {
    sim::PairGenConfig cfg;
    cfg.appearance = {5, 5, 4};
    const auto pairs = sim::generate_training_pairs(two_frame_scenario(), cfg, 5);
    sim::save_pairs(pairs, "pairs_roundtrip.bin");
    const auto back = sim::load_pairs("pairs_roundtrip.bin");
    REQUIRE(back.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(back[i].label == pairs[i].label);
        CHECK(back[i].target_box.cx == doctest::Approx(pairs[i].target_box.cx).epsilon(1e-6));
        CHECK(back[i].detection_app.v == pairs[i].detection_app.v);
    }
    std::remove("pairs_roundtrip.bin");
}

TEST_CASE("simnet checkpoint round trip preserves inference") {
    sim::SimNet net = tiny_net(21);
    Rng rng(22);
    const std::vector<BoundingBox3D> boxes = {{1, 10, 0.8, 4, 2, 1.5, 0.1}, {-5, 30, 0.8, 4, 2, 1.5, -0.4}};
    const auto apps = random_apps(2, net.cfg.appearance, rng);
    const sim::Embeddings before = sim::embed_objects(net, boxes, apps);
    sim::save_simnet(net, "simnet_roundtrip.ckpt", 12);
    sim::SimNet loaded = sim::load_simnet("simnet_roundtrip.ckpt");
    const sim::Embeddings after = sim::embed_objects(loaded, boxes, apps);
    CHECK(after.bbox_feat.v == before.bbox_feat.v);
    CHECK(after.app_feat.v == before.app_feat.v);
    CHECK(after.importance.v == before.importance.v);
    std::remove("simnet_roundtrip.ckpt");
}
