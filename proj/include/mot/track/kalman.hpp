#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace mot::track {

// Just enough fixed-size linear algebra for the 6-state constant-velocity
// filter observing 3D position.

using Vec6 = std::array<double, 6>;
using Mat6 = std::array<double, 36>; // row-major
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;

inline double& m6(Mat6& m, int r, int c) { return m[static_cast<std::size_t>(r) * 6 + c]; }
inline double m6(const Mat6& m, int r, int c) { return m[static_cast<std::size_t>(r) * 6 + c]; }

inline Mat6 identity6() {
    Mat6 m{};
    for (int i = 0; i < 6; ++i) m6(m, i, i) = 1.0;
    return m;
}

inline Mat6 matmul6(const Mat6& a, const Mat6& b) {
    Mat6 out{};
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k) {
            const double aik = m6(a, i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < 6; ++j) m6(out, i, j) += aik * m6(b, k, j);
        }
    return out;
}

inline Mat6 transpose6(const Mat6& a) {
    Mat6 out{};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m6(out, i, j) = m6(a, j, i);
    return out;
}

inline void symmetrize6(Mat6& a) {
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const double v = 0.5 * (m6(a, i, j) + m6(a, j, i));
            m6(a, i, j) = v;
            m6(a, j, i) = v;
        }
}

/// Cholesky feasibility test: PSD within `shift` (the matrix may have
/// eigenvalues down to -shift).
inline bool is_psd6(const Mat6& a, double shift = 1e-9) {
    Mat6 l{};
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m6(a, i, j) + (i == j ? shift : 0.0);
            for (int k = 0; k < j; ++k) s -= m6(l, i, k) * m6(l, j, k);
            if (i == j) {
                if (s < 0.0) return false;
                m6(l, i, i) = std::sqrt(s);
            } else {
                m6(l, i, j) = m6(l, j, j) > 0.0 ? s / m6(l, j, j) : 0.0;
            }
        }
    }
    return true;
}

inline Mat3 invert3(const Mat3& m) {
    const double a = m[0], b = m[1], c = m[2];
    const double d = m[3], e = m[4], f = m[5];
    const double g = m[6], h = m[7], i = m[8];
    const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    if (std::abs(det) < 1e-30) throw std::runtime_error("kalman: singular innovation covariance");
    const double inv = 1.0 / det;
    return {(e * i - f * h) * inv, (c * h - b * i) * inv, (b * f - c * e) * inv,
            (f * g - d * i) * inv, (a * i - c * g) * inv, (c * d - a * f) * inv,
            (d * h - e * g) * inv, (b * g - a * h) * inv, (a * e - b * d) * inv};
}

struct KalmanConfig {
    double q_pos = 0.01;       // m^2 process noise per step, each position axis
    double q_vel = 0.25;       // (m/s)^2 per step, each velocity axis
    double r_pos = 0.04;       // m^2 measurement noise, each axis
    double init_vel_var = 1.0; // (m/s)^2 on a fresh track
};

/// State [cx,cy,cz,vx,vy,vz] with covariance.
struct KalmanState {
    Vec6 x{};
    Mat6 p{};
    int resymmetrized = 0; // numerical PSD repairs, flagged not fatal
};

inline KalmanState kalman_init(const Vec3& position, const KalmanConfig& cfg) {
    KalmanState s;
    s.x = {position[0], position[1], position[2], 0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) m6(s.p, i, i) = cfg.r_pos;
    for (int i = 3; i < 6; ++i) m6(s.p, i, i) = cfg.init_vel_var;
    return s;
}

/// Constant-velocity prediction over dt with additive process noise.
inline KalmanState kalman_predict(const KalmanState& in, double dt, const KalmanConfig& cfg) {
    if (!(dt > 0.0)) throw std::invalid_argument("kalman_predict: dt must be positive");
    KalmanState s = in;
    Mat6 f = identity6();
    for (int i = 0; i < 3; ++i) m6(f, i, i + 3) = dt;
    Vec6 x{};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) x[static_cast<std::size_t>(i)] += m6(f, i, j) * s.x[static_cast<std::size_t>(j)];
    s.x = x;
    s.p = matmul6(matmul6(f, s.p), transpose6(f));
    for (int i = 0; i < 3; ++i) m6(s.p, i, i) += cfg.q_pos;
    for (int i = 3; i < 6; ++i) m6(s.p, i, i) += cfg.q_vel;
    symmetrize6(s.p);
    return s;
}

/// Linear update observing position, Joseph form.
inline KalmanState kalman_update(const KalmanState& in, const Vec3& z, const KalmanConfig& cfg) {
    KalmanState s = in;
    // innovation
    Vec3 y{};
    for (int i = 0; i < 3; ++i) y[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] - s.x[static_cast<std::size_t>(i)];
    // S = P[0:3,0:3] + R
    Mat3 sm{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sm[static_cast<std::size_t>(i) * 3 + j] = m6(s.p, i, j) + (i == j ? cfg.r_pos : 0.0);
    const Mat3 sinv = invert3(sm);
    // K = P H^T S^-1  (6x3)
    std::array<double, 18> k{};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int l = 0; l < 3; ++l) acc += m6(s.p, i, l) * sinv[static_cast<std::size_t>(l) * 3 + j];
            k[static_cast<std::size_t>(i) * 3 + j] = acc;
        }
    for (int i = 0; i < 6; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) acc += k[static_cast<std::size_t>(i) * 3 + j] * y[static_cast<std::size_t>(j)];
        s.x[static_cast<std::size_t>(i)] += acc;
    }
    // Joseph: P = (I-KH) P (I-KH)^T + K R K^T
    Mat6 ikh = identity6();
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) m6(ikh, i, j) -= k[static_cast<std::size_t>(i) * 3 + j];
    s.p = matmul6(matmul6(ikh, s.p), transpose6(ikh));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            double acc = 0.0;
            for (int l = 0; l < 3; ++l)
                acc += k[static_cast<std::size_t>(i) * 3 + l] * cfg.r_pos * k[static_cast<std::size_t>(j) * 3 + l];
            m6(s.p, i, j) += acc;
        }
    symmetrize6(s.p);
    if (!is_psd6(s.p)) {
        for (int i = 0; i < 6; ++i) m6(s.p, i, i) += 1e-9;
        ++s.resymmetrized;
    }
    return s;
}

} // namespace mot::track
