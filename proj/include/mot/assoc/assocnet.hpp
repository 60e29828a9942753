#pragma once

#include <string>
#include <vector>

#include "mot/core/checkpoint.hpp"
#include "mot/core/layers.hpp"
#include "mot/sim/similarity_map.hpp"

namespace mot::assoc {

struct AssocNetConfig {
    int n_max = 32;      // channel budget; frames with more targets are rejected
    int local_size = 21; // must match the grid's local window
    int filters1 = 32;   // d-Conv dilation 2
    int filters2 = 64;   // d-Conv dilation 4
    int filters3 = 64;   // d-Conv dilation 6
    int fc_hidden = 256;
    double m_neg = -1e6;   // additive mask at non-detection cells
    double fc_floor = -10; // masked logits are clamped here before the FC branch
    double lambda_reg = 1e-4;
    double leaky_alpha = 0.1;

    int cells() const { return local_size * local_size; }
    int map_width() const { return cells() + 1; } // grid cells + spurious entry
};

/// Data-association network: three dilated convolutions over the stacked
/// local similarity maps, association masking, a fully-connected branch for
/// the per-target spurious logits, and a per-target softmax.
template <class T>
struct AssocNetT {
    AssocNetConfig cfg;

    core::ConvLayerT<T> dconv1;
    core::BnLayerT<T> bn1;
    core::ConvLayerT<T> dconv2;
    core::BnLayerT<T> bn2;
    core::ConvLayerT<T> dconv3;
    core::BnLayerT<T> bn3;
    core::ConvLayerT<T> conv_out; // 3x3 -> n_max logit maps
    core::DenseLayerT<T> fc1;     // flattened masked logits -> hidden
    core::DenseLayerT<T> fc2;     // hidden -> n_max spurious logits

    static AssocNetT init(const AssocNetConfig& cfg, core::Rng& rng) {
        AssocNetT net;
        net.cfg = cfg;
        net.dconv1 = core::ConvLayerT<T>::init("dconv1", 3, 3, cfg.n_max, cfg.filters1, rng);
        net.bn1 = core::BnLayerT<T>::init("bn1", cfg.filters1);
        net.dconv2 = core::ConvLayerT<T>::init("dconv2", 3, 3, cfg.filters1, cfg.filters2, rng);
        net.bn2 = core::BnLayerT<T>::init("bn2", cfg.filters2);
        net.dconv3 = core::ConvLayerT<T>::init("dconv3", 3, 3, cfg.filters2, cfg.filters3, rng);
        net.bn3 = core::BnLayerT<T>::init("bn3", cfg.filters3);
        net.conv_out = core::ConvLayerT<T>::init("conv_out", 3, 3, cfg.filters3, cfg.n_max, rng);
        net.fc1 = core::DenseLayerT<T>::init("fc1", cfg.cells() * cfg.n_max, cfg.fc_hidden, rng);
        net.fc2 = core::DenseLayerT<T>::init("fc2", cfg.fc_hidden, cfg.n_max, rng);
        return net;
    }

    std::vector<core::ParamT<T>*> params() {
        return {&dconv1.w, &dconv1.b, &bn1.gamma, &bn1.beta,   &dconv2.w,   &dconv2.b, &bn2.gamma,
                &bn2.beta, &dconv3.w, &dconv3.b,  &bn3.gamma,  &bn3.beta,   &conv_out.w, &conv_out.b,
                &fc1.w,    &fc1.b,    &fc2.w,     &fc2.b};
    }

    template <class F>
    void visit_state(F&& fn) {
        for (auto* p : params()) fn(p->name, p->value);
        fn(std::string("bn1.running_mean"), bn1.state.running_mean);
        fn(std::string("bn1.running_var"), bn1.state.running_var);
        fn(std::string("bn2.running_mean"), bn2.state.running_mean);
        fn(std::string("bn2.running_var"), bn2.state.running_var);
        fn(std::string("bn3.running_mean"), bn3.state.running_mean);
        fn(std::string("bn3.running_var"), bn3.state.running_var);
    }

    bool bn_initialized() const {
        return bn1.state.initialized && bn2.state.initialized && bn3.state.initialized;
    }

    void mark_bn_initialized() {
        bn1.state.initialized = true;
        bn2.state.initialized = true;
        bn3.state.initialized = true;
    }
};

using AssocNet = AssocNetT<float>;

// ---------------------------------------------------------------------------
// per-target gather: masked logit maps + spurious logits -> [B, C, S*S+1]
// ---------------------------------------------------------------------------

template <class T>
core::IdOf<T> assoc_concat(core::TapeT<T>& tape, core::IdOf<T> grid, core::IdOf<T> spurious) {
    using namespace core;
    const auto& vg = tape.val(grid);
    const auto& vs = tape.val(spurious);
    require_rank(vg, 4, "assoc_concat grid");
    require_rank(vs, 2, "assoc_concat spurious");
    const int b = vg.shape[0], s = vg.shape[1], c = vg.shape[3];
    if (vg.shape[2] != s || vs.shape[0] != b || vs.shape[1] != c) {
        throw std::invalid_argument("assoc_concat: shape mismatch");
    }
    const int cells = s * s;
    TensorT<T> out({b, c, cells + 1});
    for (int ib = 0; ib < b; ++ib) {
        for (int iy = 0; iy < s; ++iy)
            for (int ix = 0; ix < s; ++ix) {
                const T* src = vg.data() + vg.idx4(ib, iy, ix, 0);
                for (int t = 0; t < c; ++t) {
                    out.v[(static_cast<std::size_t>(ib) * c + t) * (cells + 1) + iy * s + ix] = src[t];
                }
            }
        for (int t = 0; t < c; ++t) {
            out.v[(static_cast<std::size_t>(ib) * c + t) * (cells + 1) + cells] =
                vs.v[static_cast<std::size_t>(ib) * c + t];
        }
    }
    const bool ng = tape.any_needs_grad({grid, spurious});
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t_) {
        const auto& g = t_.grad(id);
        if (t_.needs_grad(grid)) {
            auto& gg = t_.grad(grid);
            for (int ib = 0; ib < b; ++ib)
                for (int iy = 0; iy < s; ++iy)
                    for (int ix = 0; ix < s; ++ix) {
                        T* dst = gg.data() + gg.idx4(ib, iy, ix, 0);
                        for (int t = 0; t < c; ++t) {
                            dst[t] += g.v[(static_cast<std::size_t>(ib) * c + t) * (cells + 1) + iy * s + ix];
                        }
                    }
        }
        if (t_.needs_grad(spurious)) {
            auto& gs = t_.grad(spurious);
            for (int ib = 0; ib < b; ++ib)
                for (int t = 0; t < c; ++t) {
                    gs.v[static_cast<std::size_t>(ib) * c + t] +=
                        g.v[(static_cast<std::size_t>(ib) * c + t) * (cells + 1) + cells];
                }
        }
    }));
}

/// max(x, floor) elementwise; keeps the mask visible to the FC branch
/// without feeding it -1e6 activations.
template <class T>
core::IdOf<T> clamp_min(core::TapeT<T>& tape, core::IdOf<T> x, T floor) {
    using namespace core;
    const auto& vx = tape.val(x);
    TensorT<T> out(vx.shape);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = std::max(vx.v[i], floor);
    const bool ng = tape.needs_grad(x);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        const auto& xv = t.val(x);
        auto& gx = t.grad(x);
        for (std::size_t i = 0; i < g.v.size(); ++i) {
            if (xv.v[i] > floor) gx.v[i] += g.v[i];
        }
    }));
}

// ---------------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------------

/// input: [B,S,S,N_max] stacked local maps (dummy channels zero);
/// masks: [B,S,S,N_max] additive association masks.
/// Returns per-target association distributions [B, N_max, S*S+1]; rows of
/// dummy channels are discarded by the callers (they keep the first N).
template <class T>
core::IdOf<T> assoc_forward(core::TapeT<T>& tape, AssocNetT<T>& net, core::IdOf<T> input,
                            core::IdOf<T> masks, core::Mode mode) {
    using namespace core;
    const auto& v = tape.val(input);
    require_rank(v, 4, "assoc_forward input");
    if (v.shape[1] != net.cfg.local_size || v.shape[2] != net.cfg.local_size ||
        v.shape[3] != net.cfg.n_max) {
        throw std::invalid_argument("assoc_forward: input must be [B," + std::to_string(net.cfg.local_size) +
                                    "," + std::to_string(net.cfg.local_size) + "," +
                                    std::to_string(net.cfg.n_max) + "], got " +
                                    TensorT<T>::shape_str(v.shape));
    }
    if (!tape.val(masks).same_shape(v)) throw std::invalid_argument("assoc_forward: mask shape mismatch");
    const int b = v.shape[0]; // copied now: node references go stale as ops push

    const T alpha = static_cast<T>(net.cfg.leaky_alpha);
    auto h = conv2d(tape, input, net.dconv1, {1, 2, Padding::same});
    h = batchnorm(tape, h, net.bn1, mode);
    h = leaky_relu(tape, h, alpha);
    h = conv2d(tape, h, net.dconv2, {1, 4, Padding::same});
    h = batchnorm(tape, h, net.bn2, mode);
    h = leaky_relu(tape, h, alpha);
    h = conv2d(tape, h, net.dconv3, {1, 6, Padding::same});
    h = batchnorm(tape, h, net.bn3, mode);
    h = leaky_relu(tape, h, alpha);
    auto logits = conv2d(tape, h, net.conv_out, {1, 1, Padding::same});
    auto masked = add(tape, logits, masks);

    auto fc_in = reshape(tape, clamp_min(tape, masked, static_cast<T>(net.cfg.fc_floor)),
                         {b, net.cfg.cells() * net.cfg.n_max});
    auto spur = dense(tape, leaky_relu(tape, dense(tape, fc_in, net.fc1), alpha), net.fc2);

    return softmax_last(tape, assoc_concat(tape, masked, spur));
}

// ---------------------------------------------------------------------------
// loss (Eqs. 4-5)
// ---------------------------------------------------------------------------

/// Ground-truth association for one frame: per real target the flat index of
/// its one-hot cell (ly*S+lx for a grid cell, S*S for the spurious cell).
struct AssocTruth {
    int n = 0;
    std::vector<int> cell; // n entries in [0, S*S]
};

/// Validates a one-hot [N, S*S+1] tensor and extracts the truth indices.
AssocTruth truth_from_one_hot(const core::Tensor& rows);

/// Margin binary cross-entropy of Eq. 5 summed over real targets and cells,
/// averaged over the batch; q = 1 - p. The 0.01 margin zeroes contributions
/// once a probability is within 0.01 of its target.
template <class T>
core::IdOf<T> assoc_map_loss(core::TapeT<T>& tape, core::IdOf<T> probs,
                             const std::vector<AssocTruth>& truth) {
    using namespace core;
    const auto& vp = tape.val(probs);
    require_rank(vp, 3, "assoc_map_loss probs");
    const int b = vp.shape[0], n_max = vp.shape[1], width = vp.shape[2];
    if (static_cast<int>(truth.size()) != b) throw std::invalid_argument("assoc_map_loss: batch mismatch");
    for (const auto& t : truth) {
        if (t.n > n_max || static_cast<int>(t.cell.size()) != t.n) {
            throw std::invalid_argument("assoc_map_loss: bad truth");
        }
        for (int c : t.cell) {
            if (c < 0 || c >= width) throw std::invalid_argument("assoc_map_loss: truth index out of range");
        }
    }

    double acc = 0.0;
    for (int ib = 0; ib < b; ++ib) {
        for (int t = 0; t < truth[static_cast<std::size_t>(ib)].n; ++t) {
            const int hot = truth[static_cast<std::size_t>(ib)].cell[static_cast<std::size_t>(t)];
            const T* row = vp.data() + (static_cast<std::size_t>(ib) * n_max + t) * width;
            for (int k = 0; k < width; ++k) {
                const double ph = static_cast<double>(row[k]);
                if (k == hot) {
                    acc -= std::log(std::min(ph + 0.01, 1.0));
                } else {
                    acc -= std::log(std::min(1.0 - ph + 0.01, 1.0));
                }
            }
        }
    }
    acc /= b;

    TensorT<T> out = TensorT<T>::scalar(static_cast<T>(acc));
    const bool ng = tape.needs_grad(probs);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng,
                     !ng ? nullptr : std::function<void(TapeT<T>&)>([=, truth = truth](TapeT<T>& t_) {
        const T g = t_.grad(id).v[0];
        const auto& vp_ = t_.val(probs);
        auto& gp = t_.grad(probs);
        const double inv_b = 1.0 / b;
        for (int ib = 0; ib < b; ++ib) {
            for (int tt = 0; tt < truth[static_cast<std::size_t>(ib)].n; ++tt) {
                const int hot = truth[static_cast<std::size_t>(ib)].cell[static_cast<std::size_t>(tt)];
                const std::size_t base = (static_cast<std::size_t>(ib) * n_max + tt) * width;
                for (int k = 0; k < width; ++k) {
                    const double ph = static_cast<double>(vp_.v[base + k]);
                    double d = 0.0;
                    if (k == hot) {
                        if (ph + 0.01 < 1.0) d = -1.0 / (ph + 0.01);
                    } else {
                        if (1.0 - ph + 0.01 < 1.0) d = 1.0 / (1.0 - ph + 0.01);
                    }
                    gp.v[base + k] += g * static_cast<T>(d * inv_b);
                }
            }
        }
    }));
}

/// Eq. 4: map loss plus lambda * ||Theta||^2 over the trainable parameters.
template <class T>
core::IdOf<T> assoc_loss(core::TapeT<T>& tape, AssocNetT<T>& net, core::IdOf<T> probs,
                         const std::vector<AssocTruth>& truth,
                         const std::vector<core::IdOf<T>>& param_nodes) {
    using namespace core;
    auto total = assoc_map_loss(tape, probs, truth);
    if (net.cfg.lambda_reg > 0.0 && !param_nodes.empty()) {
        IdOf<T> reg = sq_l2(tape, param_nodes[0]);
        for (std::size_t i = 1; i < param_nodes.size(); ++i) {
            reg = add(tape, reg, sq_l2(tape, param_nodes[i]));
        }
        total = add(tape, total, scalar_mul(tape, reg, static_cast<T>(net.cfg.lambda_reg)));
    }
    return total;
}

// ---------------------------------------------------------------------------
// input assembly / checkpointing (float path)
// ---------------------------------------------------------------------------

/// Stacks N local maps into [S,S,N_max]; channels N..N_max-1 stay zero.
/// Throws when N exceeds n_max (the caller must raise n_max).
core::Tensor assemble_assoc_input(const std::vector<sim::LocalSimilarityMap>& locals, int n_max);

/// Additive masks [S,S,N_max]: zero at local cells holding a detection,
/// m_neg everywhere else (including every cell of the dummy channels).
core::Tensor build_assoc_masks(const std::vector<sim::LocalSimilarityMap>& locals,
                               const sim::OccupancyGrid& occupancy, int n_max, double m_neg);

/// Text dump of association maps: one row per target, S*S+1 columns.
void dump_association_maps(const core::Tensor& probs, int n, const std::string& path);

void save_assocnet(AssocNet& net, const std::string& path, std::int64_t epoch = 0);
AssocNet load_assocnet(const std::string& path);
void fill_assocnet_checkpoint(AssocNet& net, core::Checkpoint& ck);
void read_assocnet_checkpoint(AssocNet& net, const core::Checkpoint& ck);

} // namespace mot::assoc
