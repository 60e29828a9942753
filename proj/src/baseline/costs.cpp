#include "mot/baseline/costs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mot::baseline {

double position_cost(const geom::BoundingBox3D& a, const geom::BoundingBox3D& b, PositionMetric metric) {
    const double dx = a.cx - b.cx, dy = a.cy - b.cy, dz = a.cz - b.cz;
    if (metric == PositionMetric::euclidean) return std::sqrt(dx * dx + dy * dy + dz * dz);
    return std::abs(dx) + std::abs(dy) + std::abs(dz);
}

double histogram_cost(const std::vector<double>& p, const std::vector<double>& q, HistogramMetric metric,
                      bool* clamped) {
    if (clamped) *clamped = false;
    if (p.size() != q.size() || p.empty()) throw std::invalid_argument("histogram_cost: size mismatch");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) throw std::invalid_argument("histogram_cost: negative bin");
        sp += p[i];
        sq += q[i];
    }
    if (std::abs(sp - 1.0) > 1e-6 || std::abs(sq - 1.0) > 1e-6) {
        throw std::invalid_argument("histogram_cost: histograms must sum to 1");
    }
    if (metric == HistogramMetric::bhattacharyya) {
        double bc = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
        if (bc <= 0.0) {
            if (clamped) *clamped = true;
            return kBhattacharyyaClamp;
        }
        return std::min(-std::log(bc), kBhattacharyyaClamp);
    }
    constexpr double eps = 1e-10;
    double chi = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        chi += d * d / (p[i] + q[i] + eps);
    }
    return 0.5 * chi;
}

std::vector<double> appearance_histogram(const core::Tensor& feature, double lo, double hi,
                                         int bins_per_channel) {
    if (feature.rank() != 3) throw std::invalid_argument("appearance_histogram: expects [H,W,C]");
    if (!(hi > lo)) throw std::invalid_argument("appearance_histogram: empty value range");
    const int h = feature.shape[0], w = feature.shape[1], c = feature.shape[2];
    std::vector<double> hist(static_cast<std::size_t>(bins_per_channel) * c, 0.0);
    const double scale = bins_per_channel / (hi - lo);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < c; ++ch) {
                const double v = feature.v[(static_cast<std::size_t>(y) * w + x) * c + ch];
                int bin = static_cast<int>((v - lo) * scale);
                bin = std::clamp(bin, 0, bins_per_channel - 1);
                hist[static_cast<std::size_t>(ch) * bins_per_channel + bin] += 1.0;
            }
        }
    }
    const double total = static_cast<double>(h) * w * c;
    for (auto& v : hist) v /= total;
    return hist;
}

std::pair<double, double> appearance_value_range(const std::vector<const core::Tensor*>& features) {
    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const core::Tensor* f : features) {
        for (float v : f->v) {
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, static_cast<double>(v));
                hi = std::max(hi, static_cast<double>(v));
            }
        }
    }
    if (!(hi > lo)) hi = lo + 1.0;
    return {lo, hi};
}

} // namespace mot::baseline
