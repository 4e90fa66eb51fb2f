#pragma once

#include <array>
#include <string>
#include <vector>

namespace ainav {

// phi(x) = exp(-||x||^2 / 0.25), applied to an error vector's squared norm.
double phi_sq(double sq_norm);
double phi1(double err);                      // scalar error
double phi2(double ex, double ey);            // planar error

struct JointSample {
    // Per-joint vectors; lengths must agree across fields.
    std::vector<double> tau;        // applied torques
    std::vector<double> qdd;        // joint accelerations
    std::vector<double> q_star;     // current position targets
    std::vector<double> q_star_prev;
};

struct BaseSample {
    std::array<double, 3> v = {0, 0, 0};      // base linear velocity
    std::array<double, 3> omega = {0, 0, 0};  // base angular velocity
    std::array<double, 2> x = {0, 0};         // base planar position
    double heading = 0.0;                      // base yaw
    int collisions = 0;                        // undesired contact count
    std::array<double, 4> t_air = {0, 0, 0, 0};  // per-foot air time
};

struct CommandSample {
    std::array<double, 2> v_star = {0, 0};  // commanded planar velocity
    double omega_star_z = 0.0;               // commanded yaw rate
    std::array<double, 2> x_star = {0, 0};   // commanded base position
    std::array<double, 2> x_obj = {0, 0};    // object planar position
    double obj_heading = 0.0;                // object yaw
    std::array<double, 2> x_obj_star = {0, 0};
    double obj_heading_star = 0.0;
};

struct RewardConfig {
    // The negative-x-velocity term is printed as max(v_bx, 0) with a positive
    // weight, which rewards forward velocity. Enable this flag to negate the
    // term so it acts as the penalty its name suggests.
    bool forward_velocity_as_penalty = false;
};

struct RewardTerm {
    std::string name;
    double raw = 0.0;
    double weight = 0.0;
    double weighted() const { return raw * weight; }
};

struct RewardBreakdown {
    std::vector<RewardTerm> terms;
    double total() const;
    const RewardTerm* find(const std::string& name) const;
};

RewardBreakdown walk_reward(const JointSample& j, const BaseSample& b,
                            const CommandSample& c,
                            const RewardConfig& cfg = {});
RewardBreakdown climb_reward(const JointSample& j, const BaseSample& b,
                             const CommandSample& c,
                             const RewardConfig& cfg = {});
RewardBreakdown navigation_reward(const JointSample& j, const BaseSample& b,
                                  const CommandSample& c,
                                  const RewardConfig& cfg = {});
RewardBreakdown pushing_reward(const JointSample& j, const BaseSample& b,
                               const CommandSample& c,
                               const RewardConfig& cfg = {});

struct WeightEntry {
    const char* name;
    double weight;
};

// Published term/weight tables, in table order.
const std::vector<WeightEntry>& walk_weight_table();
const std::vector<WeightEntry>& climb_weight_table();
const std::vector<WeightEntry>& navigation_weight_table();
const std::vector<WeightEntry>& pushing_weight_table();

}  // namespace ainav
