#pragma once

#include <cmath>

namespace mot::geom {

/// Oriented 3D box: centroid in meters, axis-aligned dimensions, yaw about z.
struct BoundingBox3D {
    double cx = 0, cy = 0, cz = 0;
    double l = 1, w = 1, h = 1;
    double yaw = 0;
};

/// Normalizes to (-pi, pi].
double normalize_angle(double a);

/// SE(2) pose with a z offset: the transform from a local frame into the
/// world frame.
struct Pose {
    double x = 0, y = 0, z = 0;
    double yaw = 0;
};

/// Re-expresses a box given in `from` coordinates in `to` coordinates.
/// Dimensions are unchanged; centroid and yaw are transformed.
BoundingBox3D ego_compensate(const BoundingBox3D& box, const Pose& from, const Pose& to);

/// Intersection over union of the axis-aligned birds-eye-view footprints
/// (l along x, w along y; yaw ignored).
double iou_bev(const BoundingBox3D& a, const BoundingBox3D& b);

/// Euclidean distance between centroids.
double center_distance(const BoundingBox3D& a, const BoundingBox3D& b);

} // namespace mot::geom
