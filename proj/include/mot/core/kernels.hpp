#pragma once

#include <cstddef>
#include <string>

namespace mot::kern {

/// Vector kernels behind the dense/conv/similarity inner loops.
///
/// Every kernel has a scalar reference implementation and, where the host
/// supports it, a SIMD variant (AVX2 on x86-64, NEON on aarch64). The
/// backend is picked once at runtime; tests pin backends explicitly and
/// check the variants against the scalar reference.
enum class Backend { scalar, avx2, neon };

Backend active_backend();
bool backend_supported(Backend b);
/// Pins the dispatch table to one backend. Throws if unsupported on this host.
void force_backend(Backend b);
std::string backend_name(Backend b);

/// sum_i a[i]*b[i]
float dot(const float* a, const float* b, std::size_t n);
/// y[i] += alpha * x[i]
void axpy(float alpha, const float* x, float* y, std::size_t n);
/// x[i] *= alpha
void scale(float* x, std::size_t n, float alpha);
/// out[i] = a[i] + b[i]
void vadd(const float* a, const float* b, float* out, std::size_t n);
/// sum_i x[i], accumulated in double
double sum(const float* x, std::size_t n);
/// sum_i x[i]*x[i], accumulated in double
double sq_sum(const float* x, std::size_t n);

// Generic fallbacks so double-precision instantiations of the templated
// layers share the same call sites. Only the float overloads dispatch.
template <class T>
T dot(const T* a, const T* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return static_cast<T>(acc);
}

template <class T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
void scale(T* x, std::size_t n, T alpha) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

template <class T>
void vadd(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

template <class T>
double sum(const T* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]);
    return acc;
}

template <class T>
double sq_sum(const T* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]) * static_cast<double>(x[i]);
    return acc;
}

} // namespace mot::kern
