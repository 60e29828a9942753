#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mot/core/kernels.hpp"
#include "mot/core/tensor.hpp"

namespace mot::core {

/// Trainable parameter: value plus a persistent gradient accumulator.
template <class T>
struct ParamT {
    std::string name;
    TensorT<T> value;
    TensorT<T> grad;

    ParamT() = default;
    ParamT(std::string n, TensorT<T> val) : name(std::move(n)), value(std::move(val)) {
        grad = TensorT<T>::zeros(value.shape);
    }

    void zero_grad() {
        for (auto& g : grad.v) g = T(0);
    }
};

using Param = ParamT<float>;

/// Reverse-mode tape. Operations record their output value eagerly and a
/// closure that routes the output gradient back to the input nodes. One tape
/// per forward pass; node ids are only meaningful on the tape that issued
/// them.
template <class T>
class TapeT {
public:
    using Id = std::int32_t;

    Id leaf(TensorT<T> value, bool needs_grad = false) {
        return push(std::move(value), needs_grad, nullptr);
    }

    Id constant(TensorT<T> value) { return leaf(std::move(value), false); }

    /// Leaf bound to an external parameter; backward() accumulates the node
    /// gradient into p.grad.
    Id param(ParamT<T>& p) {
        Id id = push(p.value, true, nullptr);
        bindings_.emplace_back(id, &p);
        return id;
    }

    Id push(TensorT<T> value, bool needs_grad, std::function<void(TapeT&)> backprop) {
        nodes_.push_back(Node{std::move(value), TensorT<T>(), needs_grad, std::move(backprop)});
        return static_cast<Id>(nodes_.size() - 1);
    }

    /// Id the next push() will return; ops capture it in their closures.
    Id next_id() const { return static_cast<Id>(nodes_.size()); }

    const TensorT<T>& val(Id id) const { return node(id).value; }

    TensorT<T>& grad(Id id) {
        Node& n = node(id);
        if (n.grad.v.empty()) n.grad = TensorT<T>::zeros(n.value.shape);
        return n.grad;
    }

    bool needs_grad(Id id) const { return node(id).needs_grad; }

    bool any_needs_grad(std::initializer_list<Id> ids) const {
        for (Id id : ids) {
            if (needs_grad(id)) return true;
        }
        return false;
    }

    /// Reverse sweep from a scalar loss node. Populates bound parameter
    /// gradients. A tape supports a single backward pass.
    void backward(Id loss) {
        Node& ln = node(loss);
        if (ln.value.numel() != 1) {
            throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                        TensorT<T>::shape_str(ln.value.shape));
        }
        if (ran_backward_) throw std::logic_error("backward: tape already swept");
        ran_backward_ = true;

        grad(loss).v[0] = T(1);
        for (Id id = loss; id >= 0; --id) {
            Node& n = nodes_[static_cast<std::size_t>(id)];
            if (!n.needs_grad || !n.backprop || n.grad.v.empty()) continue;
            n.backprop(*this);
        }
        for (auto& [id, p] : bindings_) {
            Node& n = nodes_[static_cast<std::size_t>(id)];
            if (n.grad.v.empty()) continue;
            for (std::size_t i = 0; i < p->grad.v.size(); ++i) p->grad.v[i] += n.grad.v[i];
        }
    }

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        TensorT<T> value;
        TensorT<T> grad;
        bool needs_grad;
        std::function<void(TapeT&)> backprop;
    };

    Node& node(Id id) {
        if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
            throw std::invalid_argument("tape: node " + std::to_string(id) + " was not recorded here");
        }
        return nodes_[static_cast<std::size_t>(id)];
    }
    const Node& node(Id id) const { return const_cast<TapeT*>(this)->node(id); }

    std::vector<Node> nodes_;
    std::vector<std::pair<Id, ParamT<T>*>> bindings_;
    bool ran_backward_ = false;
};

using Tape = TapeT<float>;

// ---------------------------------------------------------------------------
// Elementary ops
// ---------------------------------------------------------------------------

template <class T>
using IdOf = typename TapeT<T>::Id;

template <class T>
IdOf<T> add(TapeT<T>& tape, IdOf<T> a, IdOf<T> b) {
    const auto& va = tape.val(a);
    const auto& vb = tape.val(b);
    if (!va.same_shape(vb)) throw std::invalid_argument("add: shape mismatch");
    TensorT<T> out(va.shape);
    kern::vadd(va.data(), vb.data(), out.data(), out.v.size());
    const bool ng = tape.any_needs_grad({a, b});
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        if (t.needs_grad(a)) kern::axpy(T(1), g.data(), t.grad(a).data(), g.v.size());
        if (t.needs_grad(b)) kern::axpy(T(1), g.data(), t.grad(b).data(), g.v.size());
    }));
}

template <class T>
IdOf<T> sub(TapeT<T>& tape, IdOf<T> a, IdOf<T> b) {
    const auto& va = tape.val(a);
    const auto& vb = tape.val(b);
    if (!va.same_shape(vb)) throw std::invalid_argument("sub: shape mismatch");
    TensorT<T> out(va.shape);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = va.v[i] - vb.v[i];
    const bool ng = tape.any_needs_grad({a, b});
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        if (t.needs_grad(a)) kern::axpy(T(1), g.data(), t.grad(a).data(), g.v.size());
        if (t.needs_grad(b)) kern::axpy(T(-1), g.data(), t.grad(b).data(), g.v.size());
    }));
}

template <class T>
IdOf<T> mul(TapeT<T>& tape, IdOf<T> a, IdOf<T> b) {
    const auto& va = tape.val(a);
    const auto& vb = tape.val(b);
    if (!va.same_shape(vb)) throw std::invalid_argument("mul: shape mismatch");
    TensorT<T> out(va.shape);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = va.v[i] * vb.v[i];
    const bool ng = tape.any_needs_grad({a, b});
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        if (t.needs_grad(a)) {
            auto& ga = t.grad(a);
            const auto& xb = t.val(b);
            for (std::size_t i = 0; i < g.v.size(); ++i) ga.v[i] += g.v[i] * xb.v[i];
        }
        if (t.needs_grad(b)) {
            auto& gb = t.grad(b);
            const auto& xa = t.val(a);
            for (std::size_t i = 0; i < g.v.size(); ++i) gb.v[i] += g.v[i] * xa.v[i];
        }
    }));
}

template <class T>
IdOf<T> scalar_mul(TapeT<T>& tape, IdOf<T> a, T c) {
    const auto& va = tape.val(a);
    TensorT<T> out(va.shape);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = va.v[i] * c;
    const bool ng = tape.needs_grad(a);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        kern::axpy(c, t.grad(id).data(), t.grad(a).data(), t.grad(id).v.size());
    }));
}

template <class T>
IdOf<T> sum(TapeT<T>& tape, IdOf<T> a) {
    const auto& va = tape.val(a);
    TensorT<T> out = TensorT<T>::scalar(static_cast<T>(kern::sum(va.data(), va.v.size())));
    const bool ng = tape.needs_grad(a);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const T g = t.grad(id).v[0];
        auto& ga = t.grad(a);
        for (auto& x : ga.v) x += g;
    }));
}

template <class T>
IdOf<T> mean(TapeT<T>& tape, IdOf<T> a) {
    const auto& va = tape.val(a);
    const T inv_n = T(1) / static_cast<T>(va.numel());
    return scalar_mul(tape, sum(tape, a), inv_n);
}

/// Sum of squared entries; the regularization building block.
template <class T>
IdOf<T> sq_l2(TapeT<T>& tape, IdOf<T> a) {
    const auto& va = tape.val(a);
    TensorT<T> out = TensorT<T>::scalar(static_cast<T>(kern::sq_sum(va.data(), va.v.size())));
    const bool ng = tape.needs_grad(a);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const T g = t.grad(id).v[0];
        auto& ga = t.grad(a);
        const auto& xa = t.val(a);
        for (std::size_t i = 0; i < ga.v.size(); ++i) ga.v[i] += T(2) * xa.v[i] * g;
    }));
}

template <class T>
IdOf<T> reshape(TapeT<T>& tape, IdOf<T> a, std::vector<int> new_shape) {
    const auto& va = tape.val(a);
    if (TensorT<T>::numel_of(new_shape) != va.numel()) {
        throw std::invalid_argument("reshape: element count mismatch");
    }
    TensorT<T> out(std::move(new_shape), va.v);
    const bool ng = tape.needs_grad(a);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        kern::axpy(T(1), t.grad(id).data(), t.grad(a).data(), t.grad(id).v.size());
    }));
}

/// Rows [r0, r1) along axis 0.
template <class T>
IdOf<T> slice_rows(TapeT<T>& tape, IdOf<T> a, int r0, int r1) {
    const auto& va = tape.val(a);
    if (va.rank() < 1 || r0 < 0 || r1 > va.shape[0] || r0 > r1) {
        throw std::invalid_argument("slice_rows: bad range");
    }
    std::vector<int> out_shape = va.shape;
    out_shape[0] = r1 - r0;
    if (out_shape[0] == 0) throw std::invalid_argument("slice_rows: empty slice");
    const std::size_t row = static_cast<std::size_t>(va.numel() / va.shape[0]);
    TensorT<T> out(out_shape);
    std::copy(va.v.begin() + static_cast<std::ptrdiff_t>(r0 * row),
              va.v.begin() + static_cast<std::ptrdiff_t>(r1 * row), out.v.begin());
    const bool ng = tape.needs_grad(a);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        auto& ga = t.grad(a);
        kern::axpy(T(1), g.data(), ga.data() + static_cast<std::size_t>(r0) * row, g.v.size());
    }));
}

/// Concatenation along the last axis of two tensors agreeing on all leading axes.
template <class T>
IdOf<T> concat_last(TapeT<T>& tape, IdOf<T> a, IdOf<T> b) {
    const auto& va = tape.val(a);
    const auto& vb = tape.val(b);
    if (va.rank() != vb.rank() || va.rank() < 1) throw std::invalid_argument("concat_last: rank mismatch");
    for (int i = 0; i + 1 < va.rank(); ++i) {
        if (va.shape[i] != vb.shape[i]) throw std::invalid_argument("concat_last: leading shape mismatch");
    }
    const int da = va.shape.back();
    const int db = vb.shape.back();
    std::vector<int> out_shape = va.shape;
    out_shape.back() = da + db;
    const std::size_t rows = static_cast<std::size_t>(va.numel() / da);
    TensorT<T> out(out_shape);
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(va.v.begin() + static_cast<std::ptrdiff_t>(r * da), da,
                    out.v.begin() + static_cast<std::ptrdiff_t>(r * (da + db)));
        std::copy_n(vb.v.begin() + static_cast<std::ptrdiff_t>(r * db), db,
                    out.v.begin() + static_cast<std::ptrdiff_t>(r * (da + db) + da));
    }
    const bool ng = tape.any_needs_grad({a, b});
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        for (std::size_t r = 0; r < rows; ++r) {
            const T* gr = g.data() + r * static_cast<std::size_t>(da + db);
            if (t.needs_grad(a)) kern::axpy(T(1), gr, t.grad(a).data() + r * static_cast<std::size_t>(da), static_cast<std::size_t>(da));
            if (t.needs_grad(b)) kern::axpy(T(1), gr + da, t.grad(b).data() + r * static_cast<std::size_t>(db), static_cast<std::size_t>(db));
        }
    }));
}

/// Per-row dot product of two [N,D] tensors -> [N].
template <class T>
IdOf<T> row_dot(TapeT<T>& tape, IdOf<T> a, IdOf<T> b) {
    const auto& va = tape.val(a);
    const auto& vb = tape.val(b);
    require_rank(va, 2, "row_dot");
    if (!va.same_shape(vb)) throw std::invalid_argument("row_dot: shape mismatch");
    const int n = va.shape[0];
    const std::size_t d = static_cast<std::size_t>(va.shape[1]);
    TensorT<T> out({n});
    for (int i = 0; i < n; ++i) {
        out.v[static_cast<std::size_t>(i)] = kern::dot(va.data() + i * d, vb.data() + i * d, d);
    }
    const bool ng = tape.any_needs_grad({a, b});
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        for (int i = 0; i < n; ++i) {
            const T gi = g.v[static_cast<std::size_t>(i)];
            if (t.needs_grad(a)) kern::axpy(gi, t.val(b).data() + i * d, t.grad(a).data() + i * d, d);
            if (t.needs_grad(b)) kern::axpy(gi, t.val(a).data() + i * d, t.grad(b).data() + i * d, d);
        }
    }));
}

/// Column j of a [N,K] tensor -> [N].
template <class T>
IdOf<T> col(TapeT<T>& tape, IdOf<T> a, int j) {
    const auto& va = tape.val(a);
    require_rank(va, 2, "col");
    if (j < 0 || j >= va.shape[1]) throw std::invalid_argument("col: index out of range");
    const int n = va.shape[0];
    const std::size_t k = static_cast<std::size_t>(va.shape[1]);
    TensorT<T> out({n});
    for (int i = 0; i < n; ++i) out.v[static_cast<std::size_t>(i)] = va.v[i * k + static_cast<std::size_t>(j)];
    const bool ng = tape.needs_grad(a);
    const auto id = tape.next_id();
    return tape.push(std::move(out), ng, !ng ? nullptr : std::function<void(TapeT<T>&)>([=](TapeT<T>& t) {
        const auto& g = t.grad(id);
        auto& ga = t.grad(a);
        for (int i = 0; i < n; ++i) ga.v[i * k + static_cast<std::size_t>(j)] += g.v[static_cast<std::size_t>(i)];
    }));
}

} // namespace mot::core
