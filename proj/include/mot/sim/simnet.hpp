#pragma once

#include <string>
#include <vector>

#include "mot/core/checkpoint.hpp"
#include "mot/core/layers.hpp"
#include "mot/data/detections.hpp"
#include "mot/geom.hpp"

namespace mot::sim {

struct SimNetConfig {
    int feature_dim = 128;      // F, width of the unit features
    int bbox_conv_filters = 256;
    int app_conv_filters = 64;
    data::AppearanceGeometry appearance;
    double dropout_rate = 0.5;
    double leaky_alpha = 0.1;
    double focal_gamma = 2.0;   // exponent of the hard-example weight
    double wcost_cutoff = 1e-3; // below this the example drops out of the batch
};

/// Similarity network: a bounding-box branch and an appearance branch emit
/// L2-normalized embeddings, an importance branch weighs the two cosine
/// similarities per object.
template <class T>
struct SimNetT {
    SimNetConfig cfg;

    core::ConvLayerT<T> bbox_conv; // 1x1, 7 -> C1
    core::BnLayerT<T> bbox_bn0;
    core::DenseLayerT<T> bbox_fc1; // C1 -> F
    core::BnLayerT<T> bbox_bn1;
    core::DenseLayerT<T> bbox_fc2; // F -> F, feeds the normalization

    core::ConvLayerT<T> app_conv; // 3x3 same, Ca -> C2
    core::BnLayerT<T> app_bn0;
    core::DenseLayerT<T> app_fc; // C2 -> F

    core::DenseLayerT<T> imp_fc; // 2F -> 2

    static SimNetT init(const SimNetConfig& cfg, core::Rng& rng) {
        SimNetT net;
        net.cfg = cfg;
        const int f = cfg.feature_dim;
        net.bbox_conv = core::ConvLayerT<T>::init("bbox_conv", 1, 1, 7, cfg.bbox_conv_filters, rng);
        net.bbox_bn0 = core::BnLayerT<T>::init("bbox_bn0", cfg.bbox_conv_filters);
        net.bbox_fc1 = core::DenseLayerT<T>::init("bbox_fc1", cfg.bbox_conv_filters, f, rng);
        net.bbox_bn1 = core::BnLayerT<T>::init("bbox_bn1", f);
        net.bbox_fc2 = core::DenseLayerT<T>::init("bbox_fc2", f, f, rng);
        net.app_conv = core::ConvLayerT<T>::init("app_conv", 3, 3, cfg.appearance.c, cfg.app_conv_filters, rng);
        net.app_bn0 = core::BnLayerT<T>::init("app_bn0", cfg.app_conv_filters);
        net.app_fc = core::DenseLayerT<T>::init("app_fc", cfg.app_conv_filters, f, rng);
        net.imp_fc = core::DenseLayerT<T>::init("imp_fc", 2 * f, 2, rng);
        return net;
    }

    std::vector<core::ParamT<T>*> params() {
        return {&bbox_conv.w, &bbox_conv.b, &bbox_bn0.gamma, &bbox_bn0.beta, &bbox_fc1.w, &bbox_fc1.b,
                &bbox_bn1.gamma, &bbox_bn1.beta, &bbox_fc2.w, &bbox_fc2.b, &app_conv.w, &app_conv.b,
                &app_bn0.gamma, &app_bn0.beta, &app_fc.w, &app_fc.b, &imp_fc.w, &imp_fc.b};
    }

    /// All persistent tensors, gradient-carrying or not (BN running stats).
    template <class F>
    void visit_state(F&& fn) {
        for (auto* p : params()) fn(p->name, p->value);
        fn(std::string("bbox_bn0.running_mean"), bbox_bn0.state.running_mean);
        fn(std::string("bbox_bn0.running_var"), bbox_bn0.state.running_var);
        fn(std::string("bbox_bn1.running_mean"), bbox_bn1.state.running_mean);
        fn(std::string("bbox_bn1.running_var"), bbox_bn1.state.running_var);
        fn(std::string("app_bn0.running_mean"), app_bn0.state.running_mean);
        fn(std::string("app_bn0.running_var"), app_bn0.state.running_var);
    }

    bool bn_initialized() const {
        return bbox_bn0.state.initialized && bbox_bn1.state.initialized && app_bn0.state.initialized;
    }

    void mark_bn_initialized() {
        bbox_bn0.state.initialized = true;
        bbox_bn1.state.initialized = true;
        app_bn0.state.initialized = true;
    }
};

using SimNet = SimNetT<float>;

// ---------------------------------------------------------------------------
// branch forwards (differentiable)
// ---------------------------------------------------------------------------

/// Stacked boxes [K,7] -> unit features [K,F].
template <class T>
core::IdOf<T> bbox_branch_forward(core::TapeT<T>& tape, SimNetT<T>& net, core::IdOf<T> boxes,
                                  core::Mode mode, core::Rng& dropout_rng) {
    using namespace core;
    const auto& v = tape.val(boxes);
    require_rank(v, 2, "bbox branch input");
    if (v.shape[1] != 7) throw std::invalid_argument("bbox branch: boxes must be [K,7]");
    const int k = v.shape[0];
    const T alpha = static_cast<T>(net.cfg.leaky_alpha);
    auto h = reshape(tape, boxes, {k, 1, 1, 7});
    h = conv2d(tape, h, net.bbox_conv, {1, 1, Padding::same});
    h = batchnorm(tape, h, net.bbox_bn0, mode);
    h = leaky_relu(tape, h, alpha);
    h = reshape(tape, h, {k, net.cfg.bbox_conv_filters});
    h = dense(tape, h, net.bbox_fc1);
    h = batchnorm(tape, h, net.bbox_bn1, mode);
    h = leaky_relu(tape, h, alpha);
    h = dropout(tape, h, net.cfg.dropout_rate, mode, dropout_rng);
    h = dense(tape, h, net.bbox_fc2);
    return l2_normalize_rows(tape, h);
}

/// Stacked appearance tensors [K,Ha,Wa,Ca] -> unit features [K,F].
template <class T>
core::IdOf<T> appearance_branch_forward(core::TapeT<T>& tape, SimNetT<T>& net, core::IdOf<T> feats,
                                        core::Mode mode, core::Rng& dropout_rng) {
    using namespace core;
    const auto& v = tape.val(feats);
    require_rank(v, 4, "appearance branch input");
    const auto& g = net.cfg.appearance;
    if (v.shape[1] != g.h || v.shape[2] != g.w || v.shape[3] != g.c) {
        throw std::invalid_argument("appearance branch: feature geometry mismatch, got " +
                                    TensorT<T>::shape_str(v.shape));
    }
    const T alpha = static_cast<T>(net.cfg.leaky_alpha);
    auto h = conv2d(tape, feats, net.app_conv, {1, 1, Padding::same});
    h = batchnorm(tape, h, net.app_bn0, mode);
    h = leaky_relu(tape, h, alpha);
    h = global_avg_pool(tape, h);
    h = dropout(tape, h, net.cfg.dropout_rate, mode, dropout_rng);
    h = dense(tape, h, net.app_fc);
    return l2_normalize_rows(tape, h);
}

/// Unit features of both branches [K,F]+[K,F] -> importance weights [K,2]
/// (bbox weight first). Rows sum to one by the softmax.
template <class T>
core::IdOf<T> importance_branch_forward(core::TapeT<T>& tape, SimNetT<T>& net, core::IdOf<T> bbox_feat,
                                        core::IdOf<T> app_feat) {
    using namespace core;
    auto cat = concat_last(tape, bbox_feat, app_feat);
    auto logits = relu(tape, dense(tape, cat, net.imp_fc));
    return softmax_last(tape, logits);
}

// ---------------------------------------------------------------------------
// pair training forward and loss (Eq. 1 / Eq. 2 shape)
// ---------------------------------------------------------------------------

template <class T>
struct PairBatchT {
    core::TensorT<T> boxes;       // [2B,7], targets then detections
    core::TensorT<T> appearances; // [2B,Ha,Wa,Ca]
    std::vector<int> labels;      // B entries, +1 or -1
};

using PairBatch = PairBatchT<float>;

/// Runs both branches on the stacked batch, slices target/detection halves
/// and combines branch cosines with pair-level importance weights (the mean
/// of the two objects' weight vectors, which keeps the sum at one).
/// Returns the estimated similarity per pair, [B].
template <class T>
core::IdOf<T> simnet_pair_forward(core::TapeT<T>& tape, SimNetT<T>& net, const PairBatchT<T>& batch,
                                  core::Mode mode, core::Rng& dropout_rng) {
    using namespace core;
    const int b = static_cast<int>(batch.labels.size());
    if (b == 0) throw std::invalid_argument("simnet_pair_forward: empty batch");
    if (batch.boxes.shape[0] != 2 * b) throw std::invalid_argument("simnet_pair_forward: boxes/labels mismatch");

    auto boxes = tape.leaf(batch.boxes, false);
    auto feats = tape.leaf(batch.appearances, false);
    auto bbox_u = bbox_branch_forward(tape, net, boxes, mode, dropout_rng);
    auto app_u = appearance_branch_forward(tape, net, feats, mode, dropout_rng);
    auto weights = importance_branch_forward(tape, net, bbox_u, app_u);

    auto bbox_t = slice_rows(tape, bbox_u, 0, b);
    auto bbox_d = slice_rows(tape, bbox_u, b, 2 * b);
    auto app_t = slice_rows(tape, app_u, 0, b);
    auto app_d = slice_rows(tape, app_u, b, 2 * b);
    auto w_t = slice_rows(tape, weights, 0, b);
    auto w_d = slice_rows(tape, weights, b, 2 * b);

    auto cos_bbox = row_dot(tape, bbox_t, bbox_d);
    auto cos_app = row_dot(tape, app_t, app_d);
    auto w_pair = scalar_mul(tape, add(tape, w_t, w_d), T(0.5));
    auto y_bbox = mul(tape, col(tape, w_pair, 0), cos_bbox);
    auto y_app = mul(tape, col(tape, w_pair, 1), cos_app);
    return add(tape, y_bbox, y_app);
}

/// Class-balancing and hard-example weights of Eq. 1. w_skew is
/// B/(2*count(class)); w_cost is ((1-y*yhat)/2)^gamma, zeroed below the
/// cutoff and treated as a constant during gradient computation.
inline std::vector<double> skew_and_cost_weights(const std::vector<int>& labels,
                                                 const std::vector<double>& yhat, double gamma,
                                                 double cutoff, int* n_plus_out = nullptr) {
    const std::size_t b = labels.size();
    if (yhat.size() != b) throw std::invalid_argument("skew_and_cost_weights: label/yhat size mismatch");
    std::size_t pos = 0;
    for (int y : labels) {
        if (y != 1 && y != -1) throw std::invalid_argument("skew_and_cost_weights: labels must be +-1");
        if (y == 1) ++pos;
    }
    const std::size_t neg = b - pos;
    std::vector<double> w(b, 0.0);
    int n_plus = 0;
    for (std::size_t i = 0; i < b; ++i) {
        const double skew = static_cast<double>(b) / (2.0 * (labels[i] == 1 ? pos : neg));
        double cost = std::pow(std::max(0.0, (1.0 - labels[i] * yhat[i]) / 2.0), gamma);
        if (cost < cutoff) cost = 0.0;
        w[i] = skew * cost;
        if (w[i] != 0.0) ++n_plus;
    }
    if (n_plus_out) *n_plus_out = n_plus;
    return w;
}

/// Weighted cosine distance (Eq. 1): (1/N+) * sum w_i * (1 - y_i*yhat_i),
/// N+ = count of nonzero weights. Weights are constants on the tape. An
/// all-zero weight vector yields a loss of exactly 0.
template <class T>
core::IdOf<T> simnet_loss(core::TapeT<T>& tape, core::IdOf<T> yhat, const std::vector<int>& labels,
                          const std::vector<double>& weights) {
    using namespace core;
    const auto& vy = tape.val(yhat);
    require_rank(vy, 1, "simnet_loss yhat");
    const std::size_t b = static_cast<std::size_t>(vy.shape[0]);
    if (labels.size() != b || weights.size() != b) {
        throw std::invalid_argument("simnet_loss: batch size mismatch");
    }
    int n_plus = 0;
    for (double w : weights) {
        if (w != 0.0) ++n_plus;
    }
    double acc = 0.0;
    if (n_plus > 0) {
        for (std::size_t i = 0; i < b; ++i) {
            acc += weights[i] * (1.0 - labels[i] * static_cast<double>(vy.v[i]));
        }
        acc /= n_plus;
    }
    TensorT<T> out = TensorT<T>::scalar(static_cast<T>(acc));
    const bool ng = tape.needs_grad(yhat) && n_plus > 0;
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng,
                     !ng ? nullptr
                         : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const T g = t.grad(id).v[0];
        auto& gy = t.grad(yhat);
        for (std::size_t i = 0; i < b; ++i) {
            gy.v[i] += g * static_cast<T>(-weights[i] * labels[i] / n_plus);
        }
    }));
}

// ---------------------------------------------------------------------------
// inference-side embeddings (float path)
// ---------------------------------------------------------------------------

/// Frozen branch outputs for a set of objects.
struct Embeddings {
    core::Tensor bbox_feat;  // [K,F]
    core::Tensor app_feat;   // [K,F]
    core::Tensor importance; // [K,2]

    int count() const { return bbox_feat.v.empty() ? 0 : bbox_feat.shape[0]; }
};

/// Fixed per-field conditioning of the 7 box parameters so position,
/// dimension and yaw channels reach the first layer at comparable scale.
/// Training and inference share this through stack_boxes/make_pair_batch.
template <class T>
void box_to_features(const geom::BoundingBox3D& box, T* row) {
    row[0] = static_cast<T>(box.cx / 40.0);
    row[1] = static_cast<T>(box.cy / 40.0);
    row[2] = static_cast<T>(box.cz / 4.0);
    row[3] = static_cast<T>(box.l / 5.0);
    row[4] = static_cast<T>(box.w / 2.5);
    row[5] = static_cast<T>(box.h / 2.0);
    row[6] = static_cast<T>(box.yaw / 3.141592653589793);
}

/// Stacks boxes into the branch input layout [K,7].
core::Tensor stack_boxes(const std::vector<geom::BoundingBox3D>& boxes);

/// Stacks per-object appearance tensors into [K,Ha,Wa,Ca].
core::Tensor stack_appearances(const std::vector<core::Tensor>& apps, const data::AppearanceGeometry& g);

/// Runs all three branches in infer mode. Returns empty embeddings for an
/// empty object list.
Embeddings embed_objects(SimNet& net, const std::vector<geom::BoundingBox3D>& boxes,
                         const std::vector<core::Tensor>& appearances);

/// Pair-level importance weights: mean of the two objects' weight vectors.
struct PairWeights {
    double bbox = 0.5;
    double appear = 0.5;
};
PairWeights pair_weights(const Embeddings& a, int i, const Embeddings& b, int j);

/// Eq. 2: importance-weighted sum of the two branch cosines.
double pair_similarity(const Embeddings& a, int i, const Embeddings& b, int j);

/// Checkpoint round trip for the float model.
void save_simnet(SimNet& net, const std::string& path, std::int64_t epoch = 0);
SimNet load_simnet(const std::string& path);
void fill_simnet_checkpoint(SimNet& net, core::Checkpoint& ck);
void read_simnet_checkpoint(SimNet& net, const core::Checkpoint& ck);
SimNetConfig simnet_config_from_meta(const core::Checkpoint& ck);

} // namespace mot::sim
