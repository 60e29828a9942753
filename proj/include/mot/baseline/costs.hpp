#pragma once

#include <vector>

#include "mot/core/tensor.hpp"
#include "mot/geom.hpp"

namespace mot::baseline {

enum class PositionMetric { euclidean, manhattan };
enum class HistogramMetric { bhattacharyya, chisquare };

/// Clamp for the bhattacharyya distance when the histograms have disjoint
/// support (the exact value is +inf).
constexpr double kBhattacharyyaClamp = 1e3;

/// L2 or L1 distance between box centroids.
double position_cost(const geom::BoundingBox3D& a, const geom::BoundingBox3D& b, PositionMetric metric);

/// Distance between two normalized histograms. Inputs must be nonnegative
/// and sum to one. Disjoint-support bhattacharyya is clamped to
/// kBhattacharyyaClamp (and *clamped set when provided).
double histogram_cost(const std::vector<double>& p, const std::vector<double>& q, HistogramMetric metric,
                      bool* clamped = nullptr);

/// Per-channel histogram of an appearance tensor [H,W,C]: bins_per_channel
/// bins over [lo, hi) per channel, concatenated and normalized to sum 1.
std::vector<double> appearance_histogram(const core::Tensor& feature, double lo, double hi,
                                         int bins_per_channel = 32);

/// Value range over a frame's appearance tensors, used as histogram bounds.
std::pair<double, double> appearance_value_range(const std::vector<const core::Tensor*>& features);

} // namespace mot::baseline
