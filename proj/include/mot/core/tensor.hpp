#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mot/core/rng.hpp"

namespace mot::core {

/// Dense row-major tensor. The product pipeline runs the float instantiation;
/// double instantiations back the finite-difference oracles in the tests.
template <class T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> v;

    TensorT() = default;

    explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
        v.assign(static_cast<std::size_t>(numel_of(shape)), T(0));
    }

    TensorT(std::vector<int> s, std::vector<T> values) : shape(std::move(s)), v(std::move(values)) {
        if (static_cast<std::int64_t>(v.size()) != numel_of(shape)) {
            throw std::invalid_argument("tensor: value count " + std::to_string(v.size()) +
                                        " does not match shape " + shape_str(shape));
        }
    }

    static std::int64_t numel_of(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int e : s) {
            if (e <= 0) throw std::invalid_argument("tensor: non-positive extent in shape " + shape_str(s));
            n *= e;
        }
        return n;
    }

    static std::string shape_str(const std::vector<int>& s) {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
        os << "]";
        return os.str();
    }

    static TensorT zeros(std::vector<int> s) { return TensorT(std::move(s)); }

    static TensorT full(std::vector<int> s, T value) {
        TensorT t(std::move(s));
        for (auto& x : t.v) x = value;
        return t;
    }

    static TensorT scalar(T value) { return TensorT({1}, {value}); }

    /// Uniform in [lo, hi).
    static TensorT uniform(std::vector<int> s, Rng& rng, T lo = T(-1), T hi = T(1)) {
        TensorT t(std::move(s));
        for (auto& x : t.v) x = static_cast<T>(rng.uniform(static_cast<double>(lo), static_cast<double>(hi)));
        return t;
    }

    static TensorT randn(std::vector<int> s, Rng& rng, T sigma = T(1)) {
        TensorT t(std::move(s));
        for (auto& x : t.v) x = static_cast<T>(rng.normal() * static_cast<double>(sigma));
        return t;
    }

    std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
    int rank() const { return static_cast<int>(shape.size()); }

    int dim(int i) const {
        if (i < 0 || i >= rank()) throw std::out_of_range("tensor: dim index out of range");
        return shape[static_cast<std::size_t>(i)];
    }

    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    T& at2(int i, int j) { return v[static_cast<std::size_t>(i) * shape[1] + j]; }
    T at2(int i, int j) const { return v[static_cast<std::size_t>(i) * shape[1] + j]; }

    std::size_t idx4(int n, int h, int w, int c) const {
        return ((static_cast<std::size_t>(n) * shape[1] + h) * shape[2] + w) * shape[3] + c;
    }

    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (const T& x : v) {
            if (!std::isfinite(static_cast<double>(x))) return false;
        }
        return true;
    }
};

using Tensor = TensorT<float>;

template <class T>
void require_shape(const TensorT<T>& t, const std::vector<int>& want, const char* what) {
    if (t.shape != want) {
        throw std::invalid_argument(std::string(what) + ": expected shape " + TensorT<T>::shape_str(want) +
                                    ", got " + TensorT<T>::shape_str(t.shape));
    }
}

template <class T>
void require_rank(const TensorT<T>& t, int rank, const char* what) {
    if (t.rank() != rank) {
        throw std::invalid_argument(std::string(what) + ": expected rank " + std::to_string(rank) +
                                    " tensor, got shape " + TensorT<T>::shape_str(t.shape));
    }
}

} // namespace mot::core
