#include "ainav/geometry.hpp"

#include <algorithm>

namespace ainav {

double wrap_angle(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

double distance_xy(const Pose3& a, const Pose3& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double distance_xy(double ax, double ay, double bx, double by) {
    return std::hypot(ax - bx, ay - by);
}

namespace {

// Rotate world point into the rectangle's local frame.
inline void to_local(const Footprint& fp, double px, double py, double& lx,
                     double& ly) {
    const double c = std::cos(fp.yaw);
    const double s = std::sin(fp.yaw);
    const double dx = px - fp.cx;
    const double dy = py - fp.cy;
    lx = c * dx + s * dy;
    ly = -s * dx + c * dy;
}

}  // namespace

bool Footprint::contains(double px, double py, double inflate) const {
    double lx, ly;
    to_local(*this, px, py, lx, ly);
    if (inflate <= 0.0) {
        return std::abs(lx) <= half_l && std::abs(ly) <= half_w;
    }
    // Rounded-rectangle containment: true Minkowski sum with a disc.
    const double ex = std::max(0.0, std::abs(lx) - half_l);
    const double ey = std::max(0.0, std::abs(ly) - half_w);
    return ex * ex + ey * ey <= inflate * inflate;
}

double Footprint::distance(double px, double py) const {
    double lx, ly;
    to_local(*this, px, py, lx, ly);
    const double ex = std::max(0.0, std::abs(lx) - half_l);
    const double ey = std::max(0.0, std::abs(ly) - half_w);
    return std::hypot(ex, ey);
}

std::array<std::array<double, 2>, 4> Footprint::corners() const {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    std::array<std::array<double, 2>, 4> out{};
    const double sx[4] = {+1, +1, -1, -1};
    const double sy[4] = {+1, -1, -1, +1};
    for (int i = 0; i < 4; ++i) {
        const double lx = sx[i] * half_l;
        const double ly = sy[i] * half_w;
        out[i] = {cx + c * lx - s * ly, cy + s * lx + c * ly};
    }
    return out;
}

namespace {

// Separating-axis projection of corners onto (ax, ay); returns [lo, hi].
void project(const std::array<std::array<double, 2>, 4>& pts, double ax,
             double ay, double& lo, double& hi) {
    lo = hi = pts[0][0] * ax + pts[0][1] * ay;
    for (int i = 1; i < 4; ++i) {
        const double v = pts[i][0] * ax + pts[i][1] * ay;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
}

}  // namespace

bool footprints_overlap(const Footprint& a, const Footprint& b) {
    const auto ca = a.corners();
    const auto cb = b.corners();
    const double axes[4][2] = {
        {std::cos(a.yaw), std::sin(a.yaw)},
        {-std::sin(a.yaw), std::cos(a.yaw)},
        {std::cos(b.yaw), std::sin(b.yaw)},
        {-std::sin(b.yaw), std::cos(b.yaw)},
    };
    constexpr double kEps = 1e-9;
    for (const auto& ax : axes) {
        double alo, ahi, blo, bhi;
        project(ca, ax[0], ax[1], alo, ahi);
        project(cb, ax[0], ax[1], blo, bhi);
        if (ahi <= blo + kEps || bhi <= alo + kEps) return false;
    }
    return true;
}

bool segment_hits_footprint(const Footprint& fp, double x1, double y1,
                            double x2, double y2) {
    // Work in the rectangle's local frame; then it is a slab test.
    double lx1, ly1, lx2, ly2;
    to_local(fp, x1, y1, lx1, ly1);
    to_local(fp, x2, y2, lx2, ly2);
    double t0 = 0.0, t1 = 1.0;
    const double d[2] = {lx2 - lx1, ly2 - ly1};
    const double p[2] = {lx1, ly1};
    const double e[2] = {fp.half_l, fp.half_w};
    for (int i = 0; i < 2; ++i) {
        if (std::abs(d[i]) < 1e-12) {
            if (std::abs(p[i]) > e[i]) return false;
            continue;
        }
        double ta = (-e[i] - p[i]) / d[i];
        double tb = (e[i] - p[i]) / d[i];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    // Require genuine interior crossing, not endpoint grazing.
    return t1 > 1e-9 && t0 < 1.0 - 1e-9;
}

}  // namespace ainav
