#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ainav/grid.hpp"
#include "ainav/plan_tree.hpp"
#include "ainav/world.hpp"

namespace ainav {

struct SkillInvocation {
    SkillKind skill = SkillKind::Walk;
    std::string symbolic_param;
    std::optional<Pose3> resolved_target;  // must be set before execution
    std::string object_id;                 // present iff skill == Push

    static SkillInvocation of(const PlanStep& step);
};

enum class FailureCause { Stall, Infeasible, Collision, Timeout };

std::string to_string(FailureCause c);

struct SkillOutcome {
    enum class Status { Success, Failure };

    Status status = Status::Success;
    std::optional<FailureCause> failure_cause;
    double elapsed_sim_time = 0.0;
    std::vector<std::pair<double, Pose3>> trajectory;  // strictly increasing t
    std::map<std::string, Pose3> moved_objects;
    std::string detail;  // observable cause, e.g. "box did not move under push"

    bool success() const { return status == Status::Success; }
    double path_length() const;  // xy length over the trajectory
};

struct SkillParams {
    double walk_speed = 1.0;        // m/s
    double push_speed = 0.5;        // m/s
    double climb_duration = 2.0;    // s per transition
    double dt = 0.05;               // s
    double success_radius = 0.15;   // m, walk and navigate arrival
    double push_success_radius = 0.2;  // m, box center to target
    double stall_window = 2.0;      // s of contact without box motion
    double skill_budget = 30.0;     // s per skill invocation
    double robot_radius = 0.3;      // m, grid inflation
    double climb_reach = 1.5;       // m, max horizontal climb distance
    double support_tolerance = 0.05;  // m, target z vs supporting surface
    double cell = 0.1;              // m, grid resolution
    double sense_interval = 0.5;    // s between mid-navigate sense calls
};

// Mid-navigate sensing hook: invoked at sense_interval boundaries with the
// current sim time; returns true when the belief changed (triggers an
// internal path replan). Navigate is the only skill that senses mid-flight.
using SenseHook = std::function<bool(double)>;

// Top of the tallest object whose (uninflated) footprint covers (x, y);
// 0 on bare ground.
double support_height(const WorldState& world, double x, double y);
double support_height(const BeliefState& belief, double x, double y);

SkillOutcome execute_walk(WorldState& world, BeliefState& belief,
                          const Pose3& target, const ConstraintSet& cs,
                          const SkillParams& p = {}, double t0 = 0.0);

SkillOutcome execute_climb(WorldState& world, BeliefState& belief,
                           const Pose3& target, const ConstraintSet& cs,
                           const SkillParams& p = {}, double t0 = 0.0);

SkillOutcome execute_navigate(WorldState& world, BeliefState& belief,
                              const Pose3& target, const ConstraintSet& cs,
                              const SkillParams& p = {}, double t0 = 0.0,
                              const SenseHook& sense = {});

SkillOutcome execute_push(WorldState& world, BeliefState& belief,
                          const std::string& object_id, const Pose3& target,
                          const ConstraintSet& cs, const SkillParams& p = {},
                          double t0 = 0.0);

// Dispatch on inv.skill; Infeasible when the target is unresolved.
SkillOutcome execute_skill(WorldState& world, BeliefState& belief,
                           const SkillInvocation& inv, const ConstraintSet& cs,
                           const SkillParams& p = {}, double t0 = 0.0,
                           const SenseHook& sense = {});

struct FeasibilityVerdict {
    bool feasible = true;
    std::string reason;
};

// Static check against the belief; no world access, no simulation. The
// belief's robot_pose is the assumed pre-step pose — callers that vet a
// multi-step plan update it step by step.
FeasibilityVerdict skill_feasible(const SkillInvocation& inv,
                                  const BeliefState& belief,
                                  const Bounds& bounds,
                                  const ConstraintSet& cs,
                                  const SkillParams& p = {});

}  // namespace ainav
