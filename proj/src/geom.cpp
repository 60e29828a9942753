#include "mot/geom.hpp"

#include <algorithm>

namespace mot::geom {

double normalize_angle(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    a = std::fmod(a + two_pi / 2.0, two_pi);
    if (a <= 0.0) a += two_pi;
    return a - two_pi / 2.0;
}

BoundingBox3D ego_compensate(const BoundingBox3D& box, const Pose& from, const Pose& to) {
    // local -> world
    const double cf = std::cos(from.yaw), sf = std::sin(from.yaw);
    const double wx = from.x + cf * box.cx - sf * box.cy;
    const double wy = from.y + sf * box.cx + cf * box.cy;
    const double wz = from.z + box.cz;
    // world -> target frame
    const double ct = std::cos(to.yaw), st = std::sin(to.yaw);
    const double dx = wx - to.x, dy = wy - to.y;
    BoundingBox3D out = box;
    out.cx = ct * dx + st * dy;
    out.cy = -st * dx + ct * dy;
    out.cz = wz - to.z;
    out.yaw = normalize_angle(box.yaw + from.yaw - to.yaw);
    return out;
}

double iou_bev(const BoundingBox3D& a, const BoundingBox3D& b) {
    const double ax0 = a.cx - a.l / 2, ax1 = a.cx + a.l / 2;
    const double ay0 = a.cy - a.w / 2, ay1 = a.cy + a.w / 2;
    const double bx0 = b.cx - b.l / 2, bx1 = b.cx + b.l / 2;
    const double by0 = b.cy - b.w / 2, by1 = b.cy + b.w / 2;
    const double ix = std::max(0.0, std::min(ax1, bx1) - std::max(ax0, bx0));
    const double iy = std::max(0.0, std::min(ay1, by1) - std::max(ay0, by0));
    const double inter = ix * iy;
    const double uni = a.l * a.w + b.l * b.w - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

double center_distance(const BoundingBox3D& a, const BoundingBox3D& b) {
    const double dx = a.cx - b.cx, dy = a.cy - b.cy, dz = a.cz - b.cz;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace mot::geom
