#include "mot/core/kernels.hpp"

#include <stdexcept>

#if defined(__x86_64__) || defined(_M_X64)
#define MOT_X86 1
#else
#define MOT_X86 0
#endif
#if defined(__aarch64__)
#define MOT_ARM64 1
#else
#define MOT_ARM64 0
#endif

namespace mot::kern {

namespace scalar {

float dot(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return static_cast<float>(acc);
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float* x, std::size_t n, float alpha) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void vadd(const float* a, const float* b, float* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

double sum(const float* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]);
    return acc;
}

double sq_sum(const float* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]) * static_cast<double>(x[i]);
    return acc;
}

} // namespace scalar

#if MOT_HAVE_AVX2
namespace avx2 {
bool available();
float dot(const float* a, const float* b, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float* x, std::size_t n, float alpha);
void vadd(const float* a, const float* b, float* out, std::size_t n);
double sum(const float* x, std::size_t n);
double sq_sum(const float* x, std::size_t n);
} // namespace avx2
#endif

#if MOT_ARM64
namespace neon {
float dot(const float* a, const float* b, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float* x, std::size_t n, float alpha);
void vadd(const float* a, const float* b, float* out, std::size_t n);
double sum(const float* x, std::size_t n);
double sq_sum(const float* x, std::size_t n);
} // namespace neon
#endif

namespace {

struct Table {
    float (*dot)(const float*, const float*, std::size_t);
    void (*axpy)(float, const float*, float*, std::size_t);
    void (*scale)(float*, std::size_t, float);
    void (*vadd)(const float*, const float*, float*, std::size_t);
    double (*sum)(const float*, std::size_t);
    double (*sq_sum)(const float*, std::size_t);
    Backend backend;
};

Table make_table(Backend b) {
    switch (b) {
#if MOT_HAVE_AVX2
    case Backend::avx2:
        return {avx2::dot, avx2::axpy, avx2::scale, avx2::vadd, avx2::sum, avx2::sq_sum, Backend::avx2};
#endif
#if MOT_ARM64
    case Backend::neon:
        return {neon::dot, neon::axpy, neon::scale, neon::vadd, neon::sum, neon::sq_sum, Backend::neon};
#endif
    default:
        return {scalar::dot, scalar::axpy, scalar::scale, scalar::vadd, scalar::sum, scalar::sq_sum,
                Backend::scalar};
    }
}

Backend detect_backend() {
#if MOT_HAVE_AVX2
    if (avx2::available()) return Backend::avx2;
#endif
#if MOT_ARM64
    return Backend::neon;
#endif
    return Backend::scalar;
}

Table& table() {
    static Table t = make_table(detect_backend());
    return t;
}

} // namespace

Backend active_backend() { return table().backend; }

bool backend_supported(Backend b) {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if MOT_HAVE_AVX2
        return avx2::available();
#else
        return false;
#endif
    case Backend::neon:
        return MOT_ARM64 != 0;
    }
    return false;
}

void force_backend(Backend b) {
    if (!backend_supported(b)) {
        throw std::runtime_error("kernel backend not supported on this host: " + backend_name(b));
    }
    table() = make_table(b);
}

std::string backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
    }
    return "?";
}

float dot(const float* a, const float* b, std::size_t n) { return table().dot(a, b, n); }
void axpy(float alpha, const float* x, float* y, std::size_t n) { table().axpy(alpha, x, y, n); }
void scale(float* x, std::size_t n, float alpha) { table().scale(x, n, alpha); }
void vadd(const float* a, const float* b, float* out, std::size_t n) { table().vadd(a, b, out, n); }
double sum(const float* x, std::size_t n) { return table().sum(x, n); }
double sq_sum(const float* x, std::size_t n) { return table().sq_sum(x, n); }

} // namespace mot::kern
