#include "ainav/rewards.hpp"

#include <cmath>

#include "ainav/geometry.hpp"

namespace ainav {

double phi_sq(double sq_norm) { return std::exp(-sq_norm / 0.25); }

double phi1(double err) { return phi_sq(err * err); }

double phi2(double ex, double ey) { return phi_sq(ex * ex + ey * ey); }

double RewardBreakdown::total() const {
    double t = 0.0;
    for (const auto& term : terms) t += term.weighted();
    return t;
}

const RewardTerm* RewardBreakdown::find(const std::string& name) const {
    for (const auto& t : terms)
        if (t.name == name) return &t;
    return nullptr;
}

namespace {

double sq_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double sq_norm_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
    double s = 0.0;
    const size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// cos of the angle between planar vectors; 0 when either is degenerate.
double cos_between(double ax, double ay, double bx, double by) {
    const double na = std::hypot(ax, ay);
    const double nb = std::hypot(bx, by);
    if (na < 1e-9 || nb < 1e-9) return 0.0;
    return (ax * bx + ay * by) / (na * nb);
}

// Penalty block shared verbatim between the walk and climb tables.
void append_common_penalties(RewardBreakdown& out, const JointSample& j,
                             const BaseSample& b) {
    out.terms.push_back({"Linear velocity penalty", -(b.v[2] * b.v[2]), 2.0});
    out.terms.push_back(
        {"Angular velocity penalty",
         -(b.omega[0] * b.omega[0] + b.omega[1] * b.omega[1]), 0.05});
    out.terms.push_back({"Joint torques", -sq_norm(j.tau), 0.00001});
    out.terms.push_back({"Joint accelerations", -sq_norm(j.qdd), 2.5e-7});
    out.terms.push_back(
        {"Action rate", -sq_norm_diff(j.q_star, j.q_star_prev), 0.01});
    out.terms.push_back({"Collisions", -static_cast<double>(b.collisions),
                         1.0});
    double air = 0.0;
    for (double t : b.t_air) air += t - 0.5;
    out.terms.push_back({"Feet air time", air, 0.125});
}

double neg_x_velocity(const BaseSample& b, const RewardConfig& cfg) {
    const double raw = std::max(b.v[0], 0.0);
    return cfg.forward_velocity_as_penalty ? -raw : raw;
}

}  // namespace

RewardBreakdown walk_reward(const JointSample& j, const BaseSample& b,
                            const CommandSample& c, const RewardConfig&) {
    RewardBreakdown out;
    out.terms.push_back({"Linear velocity tracking",
                         phi2(c.v_star[0] - b.v[0], c.v_star[1] - b.v[1]),
                         1.0});
    out.terms.push_back(
        {"Angular velocity tracking", phi1(c.omega_star_z - b.omega[2]), 0.5});
    append_common_penalties(out, j, b);
    return out;
}

RewardBreakdown climb_reward(const JointSample& j, const BaseSample& b,
                             const CommandSample& c, const RewardConfig&) {
    RewardBreakdown out;
    const double ex = c.x_star[0] - b.x[0];
    const double ey = c.x_star[1] - b.x[1];
    out.terms.push_back(
        {"Position tracking", 1.0 - 0.5 * std::hypot(ex, ey), 1.0});
    out.terms.push_back(
        {"Move direction", cos_between(b.v[0], b.v[1], ex, ey), 2.0});
    append_common_penalties(out, j, b);
    return out;
}

RewardBreakdown navigation_reward(const JointSample&, const BaseSample& b,
                                  const CommandSample& c,
                                  const RewardConfig& cfg) {
    RewardBreakdown out;
    const double ex = c.x_star[0] - b.x[0];
    const double ey = c.x_star[1] - b.x[1];
    out.terms.push_back(
        {"Position tracking", 1.0 - 0.5 * std::hypot(ex, ey), 5.0});
    out.terms.push_back(
        {"Negative x-velocity penalty", neg_x_velocity(b, cfg), 2.0});
    out.terms.push_back(
        {"Collisions", -static_cast<double>(b.collisions), 10.0});
    return out;
}

RewardBreakdown pushing_reward(const JointSample&, const BaseSample& b,
                               const CommandSample& c,
                               const RewardConfig& cfg) {
    RewardBreakdown out;
    out.terms.push_back({"Object Position tracking",
                         1.0 - std::hypot(c.x_obj_star[0] - c.x_obj[0],
                                          c.x_obj_star[1] - c.x_obj[1]),
                         2.0});
    out.terms.push_back(
        {"Object heading tracking",
         1.0 - std::abs(wrap_angle(c.obj_heading_star - c.obj_heading)), 1.0});
    out.terms.push_back(
        {"Negative x-velocity penalty", neg_x_velocity(b, cfg), 1.0});
    out.terms.push_back({"Face to object",
                         cos_between(std::cos(b.heading), std::sin(b.heading),
                                     c.x_obj[0] - b.x[0], c.x_obj[1] - b.x[1]),
                         2.0});
    return out;
}

namespace {

const std::vector<WeightEntry> kWalkTable = {
    {"Linear velocity tracking", 1.0},
    {"Angular velocity tracking", 0.5},
    {"Linear velocity penalty", 2.0},
    {"Angular velocity penalty", 0.05},
    {"Joint torques", 0.00001},
    {"Joint accelerations", 2.5e-7},
    {"Action rate", 0.01},
    {"Collisions", 1.0},
    {"Feet air time", 0.125},
};

const std::vector<WeightEntry> kClimbTable = {
    {"Position tracking", 1.0},
    {"Move direction", 2.0},
    {"Linear velocity penalty", 2.0},
    {"Angular velocity penalty", 0.05},
    {"Joint torques", 0.00001},
    {"Joint accelerations", 2.5e-7},
    {"Action rate", 0.01},
    {"Collisions", 1.0},
    {"Feet air time", 0.125},
};

const std::vector<WeightEntry> kNavigationTable = {
    {"Position tracking", 5.0},
    {"Negative x-velocity penalty", 2.0},
    {"Collisions", 10.0},
};

const std::vector<WeightEntry> kPushingTable = {
    {"Object Position tracking", 2.0},
    {"Object heading tracking", 1.0},
    {"Negative x-velocity penalty", 1.0},
    {"Face to object", 2.0},
};

}  // namespace

const std::vector<WeightEntry>& walk_weight_table() { return kWalkTable; }
const std::vector<WeightEntry>& climb_weight_table() { return kClimbTable; }
const std::vector<WeightEntry>& navigation_weight_table() {
    return kNavigationTable;
}
const std::vector<WeightEntry>& pushing_weight_table() {
    return kPushingTable;
}

}  // namespace ainav
