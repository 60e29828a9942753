#pragma once

#include <algorithm>
#include <cmath>

#include "mot/core/tape.hpp"

namespace mot::core {

enum class Mode { train, infer };

enum class Padding { same, valid };

template <class T>
struct DenseLayerT {
    ParamT<T> w; // [in, out]
    ParamT<T> b; // [out]

    static DenseLayerT init(const std::string& name, int in, int out, Rng& rng) {
        const T limit = static_cast<T>(std::sqrt(6.0 / in));
        DenseLayerT l;
        l.w = ParamT<T>(name + ".w", TensorT<T>::uniform({in, out}, rng, -limit, limit));
        l.b = ParamT<T>(name + ".b", TensorT<T>::zeros({out}));
        return l;
    }
};

template <class T>
struct ConvLayerT {
    ParamT<T> w; // [kh, kw, cin, cout]
    ParamT<T> b; // [cout]

    static ConvLayerT init(const std::string& name, int kh, int kw, int cin, int cout, Rng& rng) {
        const T limit = static_cast<T>(std::sqrt(6.0 / (static_cast<double>(kh) * kw * cin)));
        ConvLayerT l;
        l.w = ParamT<T>(name + ".w", TensorT<T>::uniform({kh, kw, cin, cout}, rng, -limit, limit));
        l.b = ParamT<T>(name + ".b", TensorT<T>::zeros({cout}));
        return l;
    }
};

/// Running statistics of a batch-norm layer. Updated as a side effect of
/// train-mode forward passes; required before the first infer-mode pass.
template <class T>
struct BnStateT {
    TensorT<T> running_mean;
    TensorT<T> running_var;
    bool initialized = false;
};

template <class T>
struct BnLayerT {
    ParamT<T> gamma;
    ParamT<T> beta;
    BnStateT<T> state;

    static BnLayerT init(const std::string& name, int channels) {
        BnLayerT l;
        l.gamma = ParamT<T>(name + ".gamma", TensorT<T>::full({channels}, T(1)));
        l.beta = ParamT<T>(name + ".beta", TensorT<T>::zeros({channels}));
        l.state.running_mean = TensorT<T>::zeros({channels});
        l.state.running_var = TensorT<T>::full({channels}, T(1));
        return l;
    }
};

using DenseLayer = DenseLayerT<float>;
using ConvLayer = ConvLayerT<float>;
using BnLayer = BnLayerT<float>;
using BnState = BnStateT<float>;

// ---------------------------------------------------------------------------
// dense: [N,D] x [D,K] + [K] -> [N,K]
// ---------------------------------------------------------------------------

template <class T>
IdOf<T> dense(TapeT<T>& tape, IdOf<T> x, IdOf<T> w, IdOf<T> b) {
    const auto& vx = tape.val(x);
    const auto& vw = tape.val(w);
    const auto& vb = tape.val(b);
    require_rank(vx, 2, "dense input");
    require_rank(vw, 2, "dense weights");
    if (vx.shape[1] != vw.shape[0]) {
        throw std::invalid_argument("dense: input depth " + std::to_string(vx.shape[1]) +
                                    " does not match weight extent " + std::to_string(vw.shape[0]));
    }
    require_shape(vb, {vw.shape[1]}, "dense bias");
    if (!vw.all_finite() || !vb.all_finite()) throw std::invalid_argument("dense: non-finite parameters");

    const int n = vx.shape[0];
    const int d = vx.shape[1];
    const std::size_t k = static_cast<std::size_t>(vw.shape[1]);
    TensorT<T> out({n, static_cast<int>(k)});
    for (int i = 0; i < n; ++i) {
        T* orow = out.data() + i * k;
        std::copy_n(vb.data(), k, orow);
        const T* xrow = vx.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) {
            if (xrow[j] != T(0)) kern::axpy(xrow[j], vw.data() + static_cast<std::size_t>(j) * k, orow, k);
        }
    }
    const bool ng = tape.any_needs_grad({x, w, b});
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        const auto& xv = t.val(x);
        const auto& wv = t.val(w);
        for (int i = 0; i < n; ++i) {
            const T* grow = g.data() + i * k;
            if (t.needs_grad(x)) {
                T* gxrow = t.grad(x).data() + static_cast<std::size_t>(i) * d;
                for (int j = 0; j < d; ++j) {
                    gxrow[j] += kern::dot(grow, wv.data() + static_cast<std::size_t>(j) * k, k);
                }
            }
            if (t.needs_grad(w)) {
                const T* xrow = xv.data() + static_cast<std::size_t>(i) * d;
                auto& gw = t.grad(w);
                for (int j = 0; j < d; ++j) {
                    if (xrow[j] != T(0)) kern::axpy(xrow[j], grow, gw.data() + static_cast<std::size_t>(j) * k, k);
                }
            }
            if (t.needs_grad(b)) kern::axpy(T(1), grow, t.grad(b).data(), k);
        }
    }));
}

template <class T>
IdOf<T> dense(TapeT<T>& tape, IdOf<T> x, DenseLayerT<T>& layer) {
    return dense(tape, x, tape.param(layer.w), tape.param(layer.b));
}

// ---------------------------------------------------------------------------
// conv2d: NHWC cross-correlation with stride/dilation, same|valid padding
// ---------------------------------------------------------------------------

struct Conv2dSpec {
    int stride = 1;
    int dilation = 1;
    Padding padding = Padding::same;
};

inline int conv_out_extent(int in, int kernel, int stride, int dilation, Padding padding) {
    const int span = (kernel - 1) * dilation + 1;
    if (padding == Padding::same) return (in + stride - 1) / stride;
    if (in < span) throw std::invalid_argument("conv2d: kernel span exceeds input extent");
    return (in - span) / stride + 1;
}

inline int conv_pad_before(int in, int out, int kernel, int stride, int dilation, Padding padding) {
    if (padding == Padding::valid) return 0;
    const int span = (kernel - 1) * dilation + 1;
    const int total = std::max(0, (out - 1) * stride + span - in);
    return total / 2;
}

template <class T>
IdOf<T> conv2d(TapeT<T>& tape, IdOf<T> x, IdOf<T> w, IdOf<T> b, Conv2dSpec spec) {
    const auto& vx = tape.val(x);
    const auto& vw = tape.val(w);
    const auto& vb = tape.val(b);
    require_rank(vx, 4, "conv2d input");
    require_rank(vw, 4, "conv2d kernel");
    if (spec.stride < 1 || spec.dilation < 1) throw std::invalid_argument("conv2d: stride/dilation must be >= 1");
    if (vw.shape[2] != vx.shape[3]) {
        throw std::invalid_argument("conv2d: kernel expects " + std::to_string(vw.shape[2]) +
                                    " input channels, input has " + std::to_string(vx.shape[3]));
    }
    require_shape(vb, {vw.shape[3]}, "conv2d bias");
    if (!vw.all_finite() || !vb.all_finite()) throw std::invalid_argument("conv2d: non-finite parameters");

    const int n = vx.shape[0], h = vx.shape[1], wd = vx.shape[2];
    const int kh = vw.shape[0], kw = vw.shape[1], cin = vw.shape[2];
    const std::size_t cout = static_cast<std::size_t>(vw.shape[3]);
    const int oh = conv_out_extent(h, kh, spec.stride, spec.dilation, spec.padding);
    const int ow = conv_out_extent(wd, kw, spec.stride, spec.dilation, spec.padding);
    const int pt = conv_pad_before(h, oh, kh, spec.stride, spec.dilation, spec.padding);
    const int pl = conv_pad_before(wd, ow, kw, spec.stride, spec.dilation, spec.padding);

    TensorT<T> out({n, oh, ow, static_cast<int>(cout)});
    for (int in_ = 0; in_ < n; ++in_) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                T* orow = out.data() + out.idx4(in_, oy, ox, 0);
                std::copy_n(vb.data(), cout, orow);
                for (int ky = 0; ky < kh; ++ky) {
                    const int iy = oy * spec.stride - pt + ky * spec.dilation;
                    if (iy < 0 || iy >= h) continue;
                    for (int kx = 0; kx < kw; ++kx) {
                        const int ix = ox * spec.stride - pl + kx * spec.dilation;
                        if (ix < 0 || ix >= wd) continue;
                        const T* xrow = vx.data() + vx.idx4(in_, iy, ix, 0);
                        const T* wrow = vw.data() + vw.idx4(ky, kx, 0, 0);
                        for (int ci = 0; ci < cin; ++ci) {
                            if (xrow[ci] != T(0)) kern::axpy(xrow[ci], wrow + static_cast<std::size_t>(ci) * cout, orow, cout);
                        }
                    }
                }
            }
        }
    }

    const bool ng = tape.any_needs_grad({x, w, b});
    const auto id = tape.next_id();
    const int stride = spec.stride, dilation = spec.dilation;
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        const auto& xv = t.val(x);
        const auto& wv = t.val(w);
        const bool want_x = t.needs_grad(x), want_w = t.needs_grad(w), want_b = t.needs_grad(b);
        for (int in_ = 0; in_ < n; ++in_) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    const T* grow = g.data() + g.idx4(in_, oy, ox, 0);
                    if (want_b) kern::axpy(T(1), grow, t.grad(b).data(), cout);
                    for (int ky = 0; ky < kh; ++ky) {
                        const int iy = oy * stride - pt + ky * dilation;
                        if (iy < 0 || iy >= h) continue;
                        for (int kx = 0; kx < kw; ++kx) {
                            const int ix = ox * stride - pl + kx * dilation;
                            if (ix < 0 || ix >= wd) continue;
                            const T* xrow = xv.data() + xv.idx4(in_, iy, ix, 0);
                            const T* wrow = wv.data() + wv.idx4(ky, kx, 0, 0);
                            if (want_x) {
                                T* gx = t.grad(x).data() + xv.idx4(in_, iy, ix, 0);
                                for (int ci = 0; ci < cin; ++ci) {
                                    gx[ci] += kern::dot(grow, wrow + static_cast<std::size_t>(ci) * cout, cout);
                                }
                            }
                            if (want_w) {
                                T* gw = t.grad(w).data() + wv.idx4(ky, kx, 0, 0);
                                for (int ci = 0; ci < cin; ++ci) {
                                    if (xrow[ci] != T(0)) kern::axpy(xrow[ci], grow, gw + static_cast<std::size_t>(ci) * cout, cout);
                                }
                            }
                        }
                    }
                }
            }
        }
    }));
}

template <class T>
IdOf<T> conv2d(TapeT<T>& tape, IdOf<T> x, ConvLayerT<T>& layer, Conv2dSpec spec) {
    return conv2d(tape, x, tape.param(layer.w), tape.param(layer.b), spec);
}

// ---------------------------------------------------------------------------
// activations
// ---------------------------------------------------------------------------

template <class T>
IdOf<T> leaky_relu(TapeT<T>& tape, IdOf<T> x, T alpha) {
    const auto& vx = tape.val(x);
    if (!vx.all_finite()) throw std::invalid_argument("leaky_relu: non-finite input");
    TensorT<T> out(vx.shape);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = vx.v[i] > T(0) ? vx.v[i] : alpha * vx.v[i];
    const bool ng = tape.needs_grad(x);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        const auto& xv = t.val(x);
        auto& gx = t.grad(x);
        for (std::size_t i = 0; i < g.v.size(); ++i) gx.v[i] += g.v[i] * (xv.v[i] > T(0) ? T(1) : alpha);
    }));
}

template <class T>
IdOf<T> relu(TapeT<T>& tape, IdOf<T> x) {
    return leaky_relu(tape, x, T(0));
}

/// Softmax along the last axis, max-subtracted for overflow safety.
template <class T>
IdOf<T> softmax_last(TapeT<T>& tape, IdOf<T> x) {
    const auto& vx = tape.val(x);
    if (!vx.all_finite()) throw std::invalid_argument("softmax: non-finite input");
    if (vx.rank() < 1) throw std::invalid_argument("softmax: rank-0 input");
    const std::size_t d = static_cast<std::size_t>(vx.shape.back());
    const std::size_t rows = static_cast<std::size_t>(vx.numel()) / d;
    TensorT<T> out(vx.shape);
    for (std::size_t r = 0; r < rows; ++r) {
        const T* in = vx.data() + r * d;
        T* o = out.data() + r * d;
        T mx = in[0];
        for (std::size_t i = 1; i < d; ++i) mx = std::max(mx, in[i]);
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            o[i] = static_cast<T>(std::exp(static_cast<double>(in[i] - mx)));
            s += static_cast<double>(o[i]);
        }
        const T inv = static_cast<T>(1.0 / s);
        for (std::size_t i = 0; i < d; ++i) o[i] *= inv;
    }
    const bool ng = tape.needs_grad(x);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        const auto& y = t.val(id);
        auto& gx = t.grad(x);
        for (std::size_t r = 0; r < rows; ++r) {
            const T* gr = g.data() + r * d;
            const T* yr = y.data() + r * d;
            double inner = 0.0;
            for (std::size_t i = 0; i < d; ++i) inner += static_cast<double>(gr[i]) * static_cast<double>(yr[i]);
            T* gxr = gx.data() + r * d;
            for (std::size_t i = 0; i < d; ++i) gxr[i] += yr[i] * (gr[i] - static_cast<T>(inner));
        }
    }));
}

// ---------------------------------------------------------------------------
// batch normalization
// ---------------------------------------------------------------------------

template <class T>
IdOf<T> batchnorm(TapeT<T>& tape, IdOf<T> x, IdOf<T> gamma, IdOf<T> beta, BnStateT<T>& state, Mode mode,
                  T momentum = T(0.99), T eps = T(1e-5)) {
    const auto& vx = tape.val(x);
    if (vx.rank() != 2 && vx.rank() != 4) throw std::invalid_argument("batchnorm: expects [N,C] or [N,H,W,C]");
    const std::size_t c = static_cast<std::size_t>(vx.shape.back());
    const std::size_t m = static_cast<std::size_t>(vx.numel()) / c;
    require_shape(tape.val(gamma), {static_cast<int>(c)}, "batchnorm gamma");
    require_shape(tape.val(beta), {static_cast<int>(c)}, "batchnorm beta");

    std::vector<T> mean(c), inv_std(c);
    if (mode == Mode::train) {
        if (vx.shape[0] < 2) throw std::invalid_argument("batchnorm: train mode needs batch size >= 2");
        std::vector<double> mu(c, 0.0), var(c, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const T* row = vx.data() + i * c;
            for (std::size_t j = 0; j < c; ++j) mu[j] += static_cast<double>(row[j]);
        }
        for (std::size_t j = 0; j < c; ++j) mu[j] /= static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            const T* row = vx.data() + i * c;
            for (std::size_t j = 0; j < c; ++j) {
                const double d = static_cast<double>(row[j]) - mu[j];
                var[j] += d * d;
            }
        }
        for (std::size_t j = 0; j < c; ++j) {
            var[j] /= static_cast<double>(m);
            mean[j] = static_cast<T>(mu[j]);
            inv_std[j] = static_cast<T>(1.0 / std::sqrt(var[j] + static_cast<double>(eps)));
            state.running_mean.v[j] = momentum * state.running_mean.v[j] + (T(1) - momentum) * mean[j];
            state.running_var.v[j] = momentum * state.running_var.v[j] + (T(1) - momentum) * static_cast<T>(var[j]);
        }
        state.initialized = true;
    } else {
        if (!state.initialized) throw std::logic_error("batchnorm: infer mode before any statistics exist");
        for (std::size_t j = 0; j < c; ++j) {
            mean[j] = state.running_mean.v[j];
            inv_std[j] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(state.running_var.v[j]) +
                                                        static_cast<double>(eps)));
        }
    }

    const auto& vg = tape.val(gamma);
    const auto& vbeta = tape.val(beta);
    TensorT<T> out(vx.shape);
    for (std::size_t i = 0; i < m; ++i) {
        const T* row = vx.data() + i * c;
        T* o = out.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) o[j] = vg.v[j] * (row[j] - mean[j]) * inv_std[j] + vbeta.v[j];
    }

    const bool ng = tape.any_needs_grad({x, gamma, beta});
    const auto id = tape.next_id();
    const bool train = mode == Mode::train;
    return tape.push(std::move(out), ng,
                     !ng ? nullptr
                         : std::function<void(TapeT<T>&)>([=, mean = std::move(mean),
                                                           inv_std = std::move(inv_std)](TapeT<T>& t) {
        const auto& g = t.grad(id);
        const auto& xv = t.val(x);
        const auto& gv = t.val(gamma);
        // per-channel reductions of g and g*xhat
        std::vector<double> sum_g(c, 0.0), sum_gx(c, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const T* gr = g.data() + i * c;
            const T* xr = xv.data() + i * c;
            for (std::size_t j = 0; j < c; ++j) {
                const double xhat = static_cast<double>((xr[j] - mean[j]) * inv_std[j]);
                sum_g[j] += static_cast<double>(gr[j]);
                sum_gx[j] += static_cast<double>(gr[j]) * xhat;
            }
        }
        if (t.needs_grad(gamma)) {
            auto& gg = t.grad(gamma);
            for (std::size_t j = 0; j < c; ++j) gg.v[j] += static_cast<T>(sum_gx[j]);
        }
        if (t.needs_grad(beta)) {
            auto& gb = t.grad(beta);
            for (std::size_t j = 0; j < c; ++j) gb.v[j] += static_cast<T>(sum_g[j]);
        }
        if (t.needs_grad(x)) {
            auto& gx = t.grad(x);
            const double inv_m = 1.0 / static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) {
                const T* gr = g.data() + i * c;
                const T* xr = xv.data() + i * c;
                T* gxr = gx.data() + i * c;
                for (std::size_t j = 0; j < c; ++j) {
                    const double scale = static_cast<double>(gv.v[j]) * static_cast<double>(inv_std[j]);
                    if (train) {
                        const double xhat = static_cast<double>((xr[j] - mean[j]) * inv_std[j]);
                        gxr[j] += static_cast<T>(scale * (static_cast<double>(gr[j]) - sum_g[j] * inv_m -
                                                          xhat * sum_gx[j] * inv_m));
                    } else {
                        gxr[j] += static_cast<T>(scale * static_cast<double>(gr[j]));
                    }
                }
            }
        }
    }));
}

template <class T>
IdOf<T> batchnorm(TapeT<T>& tape, IdOf<T> x, BnLayerT<T>& layer, Mode mode, T momentum = T(0.99),
                  T eps = T(1e-5)) {
    return batchnorm(tape, x, tape.param(layer.gamma), tape.param(layer.beta), layer.state, mode, momentum, eps);
}

// ---------------------------------------------------------------------------
// pooling / normalization / dropout
// ---------------------------------------------------------------------------

template <class T>
IdOf<T> global_avg_pool(TapeT<T>& tape, IdOf<T> x) {
    const auto& vx = tape.val(x);
    require_rank(vx, 4, "global_avg_pool");
    const int n = vx.shape[0], h = vx.shape[1], w = vx.shape[2];
    const std::size_t c = static_cast<std::size_t>(vx.shape[3]);
    const std::size_t spatial = static_cast<std::size_t>(h) * w;
    TensorT<T> out({n, static_cast<int>(c)});
    for (int i = 0; i < n; ++i) {
        std::vector<double> acc(c, 0.0);
        const T* base = vx.data() + static_cast<std::size_t>(i) * spatial * c;
        for (std::size_t s = 0; s < spatial; ++s) {
            for (std::size_t j = 0; j < c; ++j) acc[j] += static_cast<double>(base[s * c + j]);
        }
        for (std::size_t j = 0; j < c; ++j) {
            out.v[static_cast<std::size_t>(i) * c + j] = static_cast<T>(acc[j] / static_cast<double>(spatial));
        }
    }
    const bool ng = tape.needs_grad(x);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        auto& gx = t.grad(x);
        const T inv = T(1) / static_cast<T>(spatial);
        for (int i = 0; i < n; ++i) {
            const T* gr = g.data() + static_cast<std::size_t>(i) * c;
            T* base = gx.data() + static_cast<std::size_t>(i) * spatial * c;
            for (std::size_t s = 0; s < spatial; ++s) {
                for (std::size_t j = 0; j < c; ++j) base[s * c + j] += gr[j] * inv;
            }
        }
    }));
}

/// Row-wise L2 normalization of [N,D]. Zero rows pass through as zeros; when
/// that happens *zero_rows is incremented instead of dividing by zero.
template <class T>
IdOf<T> l2_normalize_rows(TapeT<T>& tape, IdOf<T> x, int* zero_rows = nullptr) {
    const auto& vx = tape.val(x);
    require_rank(vx, 2, "l2_normalize");
    const int n = vx.shape[0];
    const std::size_t d = static_cast<std::size_t>(vx.shape[1]);
    TensorT<T> out(vx.shape);
    std::vector<T> inv_norm(static_cast<std::size_t>(n), T(0));
    for (int i = 0; i < n; ++i) {
        const T* row = vx.data() + i * d;
        const double nrm = std::sqrt(kern::sq_sum(row, d));
        T* o = out.data() + i * d;
        if (nrm == 0.0) {
            if (zero_rows) ++*zero_rows;
            std::fill_n(o, d, T(0));
        } else {
            inv_norm[static_cast<std::size_t>(i)] = static_cast<T>(1.0 / nrm);
            for (std::size_t j = 0; j < d; ++j) o[j] = row[j] * inv_norm[static_cast<std::size_t>(i)];
        }
    }
    const bool ng = tape.needs_grad(x);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng,
                     !ng ? nullptr
                         : std::function<void(TapeT<T>&)>([=, inv_norm = std::move(inv_norm)](TapeT<T>& t) {
        const auto& g = t.grad(id);
        const auto& y = t.val(id);
        auto& gx = t.grad(x);
        for (int i = 0; i < n; ++i) {
            const T inv = inv_norm[static_cast<std::size_t>(i)];
            if (inv == T(0)) continue;
            const T* gr = g.data() + i * d;
            const T* yr = y.data() + i * d;
            T* gxr = gx.data() + i * d;
            const T inner = kern::dot(gr, yr, d);
            for (std::size_t j = 0; j < d; ++j) gxr[j] += inv * (gr[j] - yr[j] * inner);
        }
    }));
}

/// Inverted dropout; infer mode and rate 0 are identity (the input node is
/// returned unchanged).
template <class T>
IdOf<T> dropout(TapeT<T>& tape, IdOf<T> x, double rate, Mode mode, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0,1)");
    if (mode == Mode::infer || rate == 0.0) return x;
    const auto& vx = tape.val(x);
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    std::vector<T> mask(vx.v.size());
    for (auto& mv : mask) mv = rng.uniform() < rate ? T(0) : keep_scale;
    TensorT<T> out(vx.shape);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = vx.v[i] * mask[i];
    const bool ng = tape.needs_grad(x);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng,
                     !ng ? nullptr : std::function<void(TapeT<T>&)>([=, mask = std::move(mask)](TapeT<T>& t) {
        const auto& g = t.grad(id);
        auto& gx = t.grad(x);
        for (std::size_t i = 0; i < g.v.size(); ++i) gx.v[i] += g.v[i] * mask[i];
    }));
}

} // namespace mot::core
