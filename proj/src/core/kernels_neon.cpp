// NEON variants of the float kernels (aarch64 baseline, no runtime check).

#if defined(__aarch64__)

#include <cstddef>
#include <arm_neon.h>

namespace mot::kern::neon {

float dot(const float* a, const float* b, std::size_t n) {
    float32x4_t acc0 = vdupq_n_f32(0.f);
    float32x4_t acc1 = vdupq_n_f32(0.f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
        acc1 = vfmaq_f32(acc1, vld1q_f32(a + i + 4), vld1q_f32(b + i + 4));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
    }
    float r = vaddvq_f32(vaddq_f32(acc0, acc1));
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    const float32x4_t va = vdupq_n_f32(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), va, vld1q_f32(x + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float* x, std::size_t n, float alpha) {
    const float32x4_t va = vdupq_n_f32(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(x + i, vmulq_f32(va, vld1q_f32(x + i)));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

void vadd(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(out + i, vaddq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

double sum(const float* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t v = vld1q_f32(x + i);
        acc = vaddq_f64(acc, vcvt_f64_f32(vget_low_f32(v)));
        acc = vaddq_f64(acc, vcvt_f64_f32(vget_high_f32(v)));
    }
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += static_cast<double>(x[i]);
    return r;
}

double sq_sum(const float* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t v = vld1q_f32(x + i);
        float64x2_t d0 = vcvt_f64_f32(vget_low_f32(v));
        float64x2_t d1 = vcvt_f64_f32(vget_high_f32(v));
        acc = vfmaq_f64(acc, d0, d0);
        acc = vfmaq_f64(acc, d1, d1);
    }
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) r += static_cast<double>(x[i]) * static_cast<double>(x[i]);
    return r;
}

} // namespace mot::kern::neon

#endif // __aarch64__
