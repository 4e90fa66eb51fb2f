#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ainav {

inline constexpr double kPi = 3.14159265358979323846;

// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

// 2.5-D pose: planar position + support height + heading.
struct Pose3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double yaw = 0.0;  // radians, kept in [-pi, pi)
};

double distance_xy(const Pose3& a, const Pose3& b);
double distance_xy(double ax, double ay, double bx, double by);

struct Bounds {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    bool contains(double x, double y) const {
        return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

// Yaw-aligned rectangle on the ground plane (object footprint).
struct Footprint {
    double cx = 0.0;
    double cy = 0.0;
    double half_l = 0.0;  // half extent along local +x
    double half_w = 0.0;  // half extent along local +y
    double yaw = 0.0;

    // Point containment against the rectangle grown by `inflate` on all sides.
    bool contains(double px, double py, double inflate = 0.0) const;

    // Euclidean distance from a point to the rectangle (0 inside).
    double distance(double px, double py) const;

    std::array<std::array<double, 2>, 4> corners() const;
};

// Strict overlap test (touching edges do not count as overlap).
bool footprints_overlap(const Footprint& a, const Footprint& b);

// True if the open segment (x1,y1)-(x2,y2) crosses the footprint interior.
bool segment_hits_footprint(const Footprint& fp, double x1, double y1,
                            double x2, double y2);

}  // namespace ainav
