#include "mot/sim/simnet.hpp"

#include <cstring>

namespace mot::sim {

using core::Tensor;

core::Tensor stack_boxes(const std::vector<geom::BoundingBox3D>& boxes) {
    const int k = static_cast<int>(boxes.size());
    Tensor t({std::max(k, 1), 7});
    for (int i = 0; i < k; ++i) {
        box_to_features(boxes[static_cast<std::size_t>(i)], t.data() + static_cast<std::size_t>(i) * 7);
    }
    return t;
}

core::Tensor stack_appearances(const std::vector<Tensor>& apps, const data::AppearanceGeometry& g) {
    const int k = static_cast<int>(apps.size());
    Tensor t({std::max(k, 1), g.h, g.w, g.c});
    const std::size_t n = static_cast<std::size_t>(g.numel());
    for (int i = 0; i < k; ++i) {
        const Tensor& a = apps[static_cast<std::size_t>(i)];
        if (a.shape != g.shape()) {
            throw std::invalid_argument("stack_appearances: feature geometry mismatch at object " +
                                        std::to_string(i));
        }
        std::copy(a.v.begin(), a.v.end(), t.v.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    return t;
}

Embeddings embed_objects(SimNet& net, const std::vector<geom::BoundingBox3D>& boxes,
                         const std::vector<Tensor>& appearances) {
    if (boxes.size() != appearances.size()) {
        throw std::invalid_argument("embed_objects: box/appearance count mismatch");
    }
    Embeddings out;
    if (boxes.empty()) return out;

    core::Tape tape;
    core::Rng unused(0); // dropout is identity in infer mode
    auto b = tape.constant(stack_boxes(boxes));
    auto a = tape.constant(stack_appearances(appearances, net.cfg.appearance));
    auto bu = bbox_branch_forward(tape, net, b, core::Mode::infer, unused);
    auto au = appearance_branch_forward(tape, net, a, core::Mode::infer, unused);
    auto w = importance_branch_forward(tape, net, bu, au);
    out.bbox_feat = tape.val(bu);
    out.app_feat = tape.val(au);
    out.importance = tape.val(w);
    return out;
}

PairWeights pair_weights(const Embeddings& a, int i, const Embeddings& b, int j) {
    PairWeights w;
    w.bbox = 0.5 * (a.importance.at2(i, 0) + b.importance.at2(j, 0));
    w.appear = 0.5 * (a.importance.at2(i, 1) + b.importance.at2(j, 1));
    const double s = w.bbox + w.appear;
    if (s > 0.0) {
        w.bbox /= s;
        w.appear /= s;
    }
    return w;
}

double pair_similarity(const Embeddings& a, int i, const Embeddings& b, int j) {
    const std::size_t f = static_cast<std::size_t>(a.bbox_feat.shape[1]);
    const float cos_bbox = mot::kern::dot(a.bbox_feat.data() + i * f, b.bbox_feat.data() + j * f, f);
    const float cos_app = mot::kern::dot(a.app_feat.data() + i * f, b.app_feat.data() + j * f, f);
    const PairWeights w = pair_weights(a, i, b, j);
    return w.bbox * cos_bbox + w.appear * cos_app;
}

namespace {

std::int64_t pack_double(double v) {
    std::int64_t out;
    std::memcpy(&out, &v, 8);
    return out;
}

double unpack_double(std::int64_t v) {
    double out;
    std::memcpy(&out, &v, 8);
    return out;
}

} // namespace

void fill_simnet_checkpoint(SimNet& net, core::Checkpoint& ck) {
    net.visit_state([&](const std::string& name, Tensor& t) { ck.tensors["simnet." + name] = t; });
    ck.meta["simnet.cfg.feature_dim"] = net.cfg.feature_dim;
    ck.meta["simnet.cfg.bbox_conv_filters"] = net.cfg.bbox_conv_filters;
    ck.meta["simnet.cfg.app_conv_filters"] = net.cfg.app_conv_filters;
    ck.meta["simnet.cfg.app_h"] = net.cfg.appearance.h;
    ck.meta["simnet.cfg.app_w"] = net.cfg.appearance.w;
    ck.meta["simnet.cfg.app_c"] = net.cfg.appearance.c;
    ck.meta["simnet.cfg.dropout_rate"] = pack_double(net.cfg.dropout_rate);
    ck.meta["simnet.cfg.leaky_alpha"] = pack_double(net.cfg.leaky_alpha);
    ck.meta["simnet.cfg.focal_gamma"] = pack_double(net.cfg.focal_gamma);
    ck.meta["simnet.cfg.wcost_cutoff"] = pack_double(net.cfg.wcost_cutoff);
    ck.meta["simnet.bn_initialized"] = net.bn_initialized() ? 1 : 0;
}

SimNetConfig simnet_config_from_meta(const core::Checkpoint& ck) {
    SimNetConfig cfg;
    cfg.feature_dim = static_cast<int>(ck.meta_or("simnet.cfg.feature_dim", cfg.feature_dim));
    cfg.bbox_conv_filters = static_cast<int>(ck.meta_or("simnet.cfg.bbox_conv_filters", cfg.bbox_conv_filters));
    cfg.app_conv_filters = static_cast<int>(ck.meta_or("simnet.cfg.app_conv_filters", cfg.app_conv_filters));
    cfg.appearance.h = static_cast<int>(ck.meta_or("simnet.cfg.app_h", cfg.appearance.h));
    cfg.appearance.w = static_cast<int>(ck.meta_or("simnet.cfg.app_w", cfg.appearance.w));
    cfg.appearance.c = static_cast<int>(ck.meta_or("simnet.cfg.app_c", cfg.appearance.c));
    cfg.dropout_rate = unpack_double(ck.meta_or("simnet.cfg.dropout_rate", pack_double(cfg.dropout_rate)));
    cfg.leaky_alpha = unpack_double(ck.meta_or("simnet.cfg.leaky_alpha", pack_double(cfg.leaky_alpha)));
    cfg.focal_gamma = unpack_double(ck.meta_or("simnet.cfg.focal_gamma", pack_double(cfg.focal_gamma)));
    cfg.wcost_cutoff = unpack_double(ck.meta_or("simnet.cfg.wcost_cutoff", pack_double(cfg.wcost_cutoff)));
    return cfg;
}

void read_simnet_checkpoint(SimNet& net, const core::Checkpoint& ck) {
    net.visit_state([&](const std::string& name, Tensor& t) {
        const Tensor& src = ck.get("simnet." + name);
        if (src.shape != t.shape) {
            throw std::runtime_error("simnet checkpoint: shape mismatch for " + name);
        }
        t = src;
    });
    if (ck.meta_or("simnet.bn_initialized", 0) != 0) net.mark_bn_initialized();
}

void save_simnet(SimNet& net, const std::string& path, std::int64_t epoch) {
    core::Checkpoint ck;
    fill_simnet_checkpoint(net, ck);
    ck.meta["epoch"] = epoch;
    ck.save(path);
}

SimNet load_simnet(const std::string& path) {
    const core::Checkpoint ck = core::Checkpoint::load(path);
    core::Rng rng(0);
    SimNet net = SimNet::init(simnet_config_from_meta(ck), rng);
    read_simnet_checkpoint(net, ck);
    return net;
}

} // namespace mot::sim
