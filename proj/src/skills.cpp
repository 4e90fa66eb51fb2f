#include "ainav/skills.hpp"

#include <algorithm>
#include <cmath>

namespace ainav {

std::string to_string(FailureCause c) {
    switch (c) {
        case FailureCause::Stall: return "stall";
        case FailureCause::Infeasible: return "infeasible";
        case FailureCause::Collision: return "collision";
        case FailureCause::Timeout: return "timeout";
    }
    return {};
}

SkillInvocation SkillInvocation::of(const PlanStep& step) {
    SkillInvocation inv;
    inv.skill = step.skill;
    inv.symbolic_param = step.symbolic_param;
    inv.object_id = step.object_id;
    return inv;
}

double SkillOutcome::path_length() const {
    double len = 0.0;
    for (size_t i = 1; i < trajectory.size(); ++i)
        len += distance_xy(trajectory[i - 1].second, trajectory[i].second);
    return len;
}

double support_height(const WorldState& world, double x, double y) {
    double h = 0.0;
    for (const auto& o : world.scenario.objects)
        if (o.footprint().contains(x, y, 0.0)) h = std::max(h, o.top());
    return h;
}

double support_height(const BeliefState& belief, double x, double y) {
    double h = 0.0;
    for (const auto& [id, e] : belief.known)
        if (e.object.footprint().contains(x, y, 0.0))
            h = std::max(h, e.object.top());
    return h;
}

namespace {

SkillOutcome fail_outcome(FailureCause cause, double elapsed,
                          std::string detail,
                          std::vector<std::pair<double, Pose3>> traj = {}) {
    SkillOutcome out;
    out.status = SkillOutcome::Status::Failure;
    out.failure_cause = cause;
    out.elapsed_sim_time = elapsed;
    out.detail = std::move(detail);
    out.trajectory = std::move(traj);
    return out;
}

void sync_robot(WorldState& world, BeliefState& belief, const Pose3& pose) {
    world.robot = pose;
    belief.robot_pose = pose;
}

// Half-extent of an oriented rectangle along unit direction (ux, uy).
double half_extent_along(const Footprint& fp, double ux, double uy) {
    const double ax = std::cos(fp.yaw), ay = std::sin(fp.yaw);
    return fp.half_l * std::abs(ux * ax + uy * ay) +
           fp.half_w * std::abs(-ux * ay + uy * ax);
}

// Contact is a zero-distance measurement: the touched object's exact size
// and pose enter the belief with obs_distance 0, so no later long-range
// sighting can degrade them. Pushability stays whatever interaction showed.
void contact_learn(const WorldState& world, BeliefState& belief,
                   const std::string& id, double now) {
    const SceneObject* truth = world.find(id);
    if (!truth) return;
    BeliefEntry* be = belief.find(id);
    if (!be) {
        BeliefEntry e;
        e.object = *truth;
        e.last_seen_time = now;
        belief.known.emplace(id, std::move(e));
        return;
    }
    be->object = *truth;
    be->obs_distance = 0.0;
    be->last_seen_time = now;
}

// A refused step identifies which objects raised the blocking cell; each of
// them is in (or a hair from) contact with the robot body.
void learn_blocking_cell(const WorldState& world, BeliefState& belief,
                         const HeightGrid& grid, double x, double y,
                         double robot_z, const ConstraintSet& cs,
                         const SkillParams& p, double now) {
    double cx = x, cy = y;
    if (auto c = grid.cell_of(x, y)) grid.cell_center(c->first, c->second, cx, cy);
    for (const auto& o : world.scenario.objects)
        if (o.footprint().contains(cx, cy, p.robot_radius) &&
            o.top() - robot_z > cs.max_climb_height + 1e-9)
            contact_learn(world, belief, o.id, now);
}

}  // namespace

SkillOutcome execute_walk(WorldState& world, BeliefState& belief,
                          const Pose3& target, const ConstraintSet& cs,
                          const SkillParams& p, double t0) {
    SkillOutcome out;
    Pose3 pose = world.robot;
    if (distance_xy(pose, target) <= p.success_radius) {
        // Arrival adopts the target's facing; turning in place is free at
        // this granularity.
        pose.yaw = target.yaw;
        sync_robot(world, belief, pose);
        return out;
    }

    const HeightGrid grid =
        HeightGrid::of_world(world, p.cell, p.robot_radius);
    double elapsed = 0.0;
    while (true) {
        const double d = distance_xy(pose, target);
        if (d <= p.success_radius) break;
        if (elapsed >= p.skill_budget - 1e-12) {
            sync_robot(world, belief, pose);
            return fail_outcome(FailureCause::Timeout, elapsed,
                                "skill budget exhausted",
                                std::move(out.trajectory));
        }
        const double step = std::min(p.walk_speed * p.dt, d);
        const double yaw = std::atan2(target.y - pose.y, target.x - pose.x);
        const double nx = pose.x + std::cos(yaw) * step;
        const double ny = pose.y + std::sin(yaw) * step;
        const double nh = grid.height_at_point(nx, ny);
        if (nh - pose.z > cs.max_climb_height + 1e-9) {
            learn_blocking_cell(world, belief, grid, nx, ny, pose.z, cs, p,
                                t0 + elapsed);
            sync_robot(world, belief, pose);
            return fail_outcome(FailureCause::Collision, elapsed,
                                "blocked by obstacle too tall to climb",
                                std::move(out.trajectory));
        }
        pose = Pose3{nx, ny, nh, yaw};
        elapsed += p.dt;
        out.trajectory.push_back({t0 + elapsed, pose});
    }
    pose.yaw = target.yaw;
    sync_robot(world, belief, pose);
    out.elapsed_sim_time = elapsed;
    return out;
}

SkillOutcome execute_climb(WorldState& world, BeliefState& belief,
                           const Pose3& target, const ConstraintSet& cs,
                           const SkillParams& p, double t0) {
    const Pose3 start = world.robot;
    if (distance_xy(start, target) > p.climb_reach + 1e-9)
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "target beyond climb reach");
    const double support = support_height(world, target.x, target.y);
    if (std::abs(target.z - support) > p.support_tolerance)
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "no supporting surface at target");
    if (target.z - start.z > cs.max_climb_height + 1e-9)
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "exceeds max climb");

    Pose3 end = target;
    const double dx = target.x - start.x, dy = target.y - start.y;
    end.yaw = (std::hypot(dx, dy) > 1e-9) ? std::atan2(dy, dx) : start.yaw;
    sync_robot(world, belief, end);

    SkillOutcome out;
    out.elapsed_sim_time = p.climb_duration;
    out.trajectory.push_back({t0 + p.climb_duration, end});
    return out;
}

SkillOutcome execute_navigate(WorldState& world, BeliefState& belief,
                              const Pose3& target, const ConstraintSet& cs,
                              const SkillParams& p, double t0,
                              const SenseHook& sense) {
    SkillOutcome out;
    Pose3 pose = world.robot;
    const Bounds& bounds = world.scenario.bounds;
    if (!bounds.contains(target.x, target.y))
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "target outside bounds");
    auto arrived = [&] {
        return distance_xy(pose, target) <= p.success_radius &&
               std::abs(pose.z - target.z) <= cs.max_climb_height + 1e-9;
    };
    if (arrived()) {
        pose.yaw = target.yaw;
        sync_robot(world, belief, pose);
        return out;
    }

    const HeightGrid world_grid =
        HeightGrid::of_world(world, p.cell, p.robot_radius);
    auto plan_path = [&] {
        const HeightGrid bg =
            HeightGrid::of_belief(belief, bounds, p.cell, p.robot_radius);
        auto pts = grid_astar(bg, pose, target, cs.max_climb_height);
        if (!pts.empty()) pts.push_back({target.x, target.y});
        return pts;
    };
    auto waypoints = plan_path();
    if (waypoints.empty())
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "no path in belief");

    size_t wp = 0;
    double elapsed = 0.0;
    double next_sense = p.sense_interval;
    while (!arrived()) {
        if (elapsed >= p.skill_budget - 1e-12) {
            sync_robot(world, belief, pose);
            return fail_outcome(FailureCause::Timeout, elapsed,
                                "skill budget exhausted",
                                std::move(out.trajectory));
        }
        if (sense && elapsed + 1e-12 >= next_sense) {
            next_sense += p.sense_interval;
            sync_robot(world, belief, pose);
            if (sense(t0 + elapsed)) {
                waypoints = plan_path();
                if (waypoints.empty()) {
                    return fail_outcome(FailureCause::Infeasible, elapsed,
                                        "no path in belief after update",
                                        std::move(out.trajectory));
                }
                wp = 0;
            }
        }
        while (wp < waypoints.size() &&
               distance_xy(pose.x, pose.y, waypoints[wp].first,
                           waypoints[wp].second) <= 1e-9)
            ++wp;
        if (wp >= waypoints.size()) {
            // Path consumed without arrival: the goal cell's center height
            // disagrees with the target height.
            sync_robot(world, belief, pose);
            return fail_outcome(FailureCause::Infeasible, elapsed,
                                "path ended short of target",
                                std::move(out.trajectory));
        }
        const double dx = waypoints[wp].first - pose.x;
        const double dy = waypoints[wp].second - pose.y;
        const double d = std::hypot(dx, dy);
        const double step = std::min(p.walk_speed * p.dt, d);
        const double nx = pose.x + dx / d * step;
        const double ny = pose.y + dy / d * step;
        const double nh = world_grid.height_at_point(nx, ny);
        if (nh - pose.z > cs.max_climb_height + 1e-9) {
            learn_blocking_cell(world, belief, world_grid, nx, ny, pose.z, cs,
                                p, t0 + elapsed);
            sync_robot(world, belief, pose);
            return fail_outcome(FailureCause::Collision, elapsed,
                                "blocked by unexpected obstacle",
                                std::move(out.trajectory));
        }
        pose = Pose3{nx, ny, nh, std::atan2(dy, dx)};
        elapsed += p.dt;
        out.trajectory.push_back({t0 + elapsed, pose});
    }
    pose.yaw = target.yaw;
    sync_robot(world, belief, pose);
    out.elapsed_sim_time = elapsed;
    return out;
}

SkillOutcome execute_push(WorldState& world, BeliefState& belief,
                          const std::string& object_id, const Pose3& target,
                          const ConstraintSet& cs, const SkillParams& p,
                          double t0) {
    BeliefEntry* be = belief.find(object_id);
    if (!be)
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "unknown object: " + object_id);
    if (be->object.kind != ObjectKind::Box || !be->object.movable)
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "object not movable by kind");
    SceneObject* box = world.find(object_id);
    if (!box)
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "object missing from world");

    SkillOutcome out;
    if (distance_xy(box->pose, target) <= p.push_success_radius) return out;

    const double total = distance_xy(box->pose, target);
    const double ux = (target.x - box->pose.x) / total;
    const double uy = (target.y - box->pose.y) / total;

    // Contact stand-off: box half-extent along the push direction plus the
    // robot body and a 0.2 m margin.
    const double half = half_extent_along(box->footprint(), ux, uy);
    Pose3 contact;
    contact.x = box->pose.x - ux * (half + p.robot_radius + 0.2);
    contact.y = box->pose.y - uy * (half + p.robot_radius + 0.2);
    contact.z = support_height(world, contact.x, contact.y);
    contact.yaw = std::atan2(uy, ux);

    SkillOutcome nav =
        execute_navigate(world, belief, contact, cs, p, t0, {});
    out.trajectory = std::move(nav.trajectory);
    double elapsed = nav.elapsed_sim_time;
    if (!nav.success())
        return fail_outcome(*nav.failure_cause, elapsed,
                            "approach failed: " + nav.detail,
                            std::move(out.trajectory));

    std::vector<Footprint> others;
    for (const auto& o : world.scenario.objects)
        if (o.id != object_id) others.push_back(o.footprint());
    const bool heavy = box->push_class == PushClass::Heavy;
    const Pose3 box_start = box->pose;
    const double yaw_delta = wrap_angle(target.yaw - box_start.yaw);
    Pose3 pose = world.robot;
    pose.yaw = std::atan2(uy, ux);
    double stall = 0.0;

    auto finish_belief = [&](double now) {
        be->object.pose = box->pose;
        be->last_seen_time = now;
    };
    while (true) {
        const double remaining = distance_xy(box->pose, target);
        if (remaining <= p.push_success_radius) break;
        if (elapsed >= p.skill_budget - 1e-12) {
            sync_robot(world, belief, pose);
            finish_belief(t0 + elapsed);
            SkillOutcome f = fail_outcome(FailureCause::Timeout, elapsed,
                                          "skill budget exhausted",
                                          std::move(out.trajectory));
            if (distance_xy(box->pose, box_start) > 1e-9)
                f.moved_objects[object_id] = box->pose;
            return f;
        }
        const double step = std::min(p.push_speed * p.dt, remaining);
        auto clears = [&](double dx, double dy) {
            Footprint nf = box->footprint();
            nf.cx += dx;
            nf.cy += dy;
            for (const auto& of : others)
                if (footprints_overlap(nf, of)) return false;
            for (const auto& [cx, cy] : nf.corners())
                if (!world.scenario.bounds.contains(cx, cy)) return false;
            return true;
        };
        double mx = ux * step, my = uy * step;
        bool blocked = heavy || !clears(mx, my);
        if (blocked && !heavy) {
            // Diagonal contact slides along the obstacle face: keep the
            // axis component that still clears and closes distance.
            const bool x_first = std::abs(ux) >= std::abs(uy);
            const double cand[2][2] = {
                {x_first ? ux * step : 0.0, x_first ? 0.0 : uy * step},
                {x_first ? 0.0 : ux * step, x_first ? uy * step : 0.0}};
            for (const auto& c : cand) {
                const double nd = distance_xy(
                    box->pose.x + c[0], box->pose.y + c[1], target.x,
                    target.y);
                if (nd < remaining - 1e-12 && clears(c[0], c[1])) {
                    mx = c[0];
                    my = c[1];
                    blocked = false;
                    break;
                }
            }
        }
        elapsed += p.dt;
        if (blocked) {
            stall += p.dt;
            if (stall >= p.stall_window - 1e-12) {
                sync_robot(world, belief, pose);
                finish_belief(t0 + elapsed);
                const bool unmoved =
                    distance_xy(box->pose, box_start) <= 1e-9;
                // Zero displacement is the only observable evidence; the
                // robot cannot distinguish heavy from hard-blocked.
                be->observed_movable = !unmoved;
                if (!heavy) {
                    // The jammed box is pressed against whatever refused
                    // its next step; the box itself measures them exactly.
                    Footprint nf = box->footprint();
                    nf.cx += ux * step;
                    nf.cy += uy * step;
                    for (const auto& o : world.scenario.objects)
                        if (o.id != object_id &&
                            footprints_overlap(nf, o.footprint()))
                            contact_learn(world, belief, o.id, t0 + elapsed);
                }
                SkillOutcome f = fail_outcome(
                    FailureCause::Stall, elapsed,
                    unmoved ? "box did not move under push"
                            : "box stopped moving mid-push",
                    std::move(out.trajectory));
                if (!unmoved) f.moved_objects[object_id] = box->pose;
                return f;
            }
            continue;
        }
        stall = 0.0;
        box->pose.x += mx;
        box->pose.y += my;
        const double progress =
            distance_xy(box->pose, box_start) / std::max(total, 1e-9);
        box->pose.yaw = wrap_angle(box_start.yaw + yaw_delta * progress);
        pose.x += mx;
        pose.y += my;
        pose.z = support_height(world, pose.x, pose.y);
        out.trajectory.push_back({t0 + elapsed, pose});
    }
    sync_robot(world, belief, pose);
    finish_belief(t0 + elapsed);
    be->observed_movable = true;
    out.elapsed_sim_time = elapsed;
    if (distance_xy(box->pose, box_start) > 1e-9)
        out.moved_objects[object_id] = box->pose;
    return out;
}

SkillOutcome execute_skill(WorldState& world, BeliefState& belief,
                           const SkillInvocation& inv, const ConstraintSet& cs,
                           const SkillParams& p, double t0,
                           const SenseHook& sense) {
    if (!inv.resolved_target)
        return fail_outcome(FailureCause::Infeasible, 0.0,
                            "unresolved target");
    switch (inv.skill) {
        case SkillKind::Walk:
            return execute_walk(world, belief, *inv.resolved_target, cs, p,
                                t0);
        case SkillKind::Climb:
            return execute_climb(world, belief, *inv.resolved_target, cs, p,
                                 t0);
        case SkillKind::Navigate:
            return execute_navigate(world, belief, *inv.resolved_target, cs,
                                    p, t0, sense);
        case SkillKind::Push:
            return execute_push(world, belief, inv.object_id,
                                *inv.resolved_target, cs, p, t0);
    }
    return fail_outcome(FailureCause::Infeasible, 0.0, "unknown skill");
}

FeasibilityVerdict skill_feasible(const SkillInvocation& inv,
                                  const BeliefState& belief,
                                  const Bounds& bounds,
                                  const ConstraintSet& cs,
                                  const SkillParams& p) {
    if (!inv.resolved_target) return {false, "unresolved target"};
    const Pose3& t = *inv.resolved_target;
    if (!bounds.contains(t.x, t.y)) return {false, "target outside bounds"};
    switch (inv.skill) {
        case SkillKind::Walk: {
            const HeightGrid g =
                HeightGrid::of_belief(belief, bounds, p.cell, p.robot_radius);
            const double sx = belief.robot_pose.x, sy = belief.robot_pose.y;
            double z = belief.robot_pose.z;
            const double d = distance_xy(sx, sy, t.x, t.y);
            const int steps =
                std::max(1, static_cast<int>(std::ceil(d / (p.cell * 0.5))));
            for (int i = 1; i <= steps; ++i) {
                const double fx = sx + (t.x - sx) * i / steps;
                const double fy = sy + (t.y - sy) * i / steps;
                const double h = g.height_at_point(fx, fy);
                if (h - z > cs.max_climb_height + 1e-9)
                    return {false, "straight line blocked"};
                z = h;
            }
            return {true, {}};
        }
        case SkillKind::Climb: {
            if (distance_xy(belief.robot_pose, t) > p.climb_reach + 1e-9)
                return {false, "target beyond climb reach"};
            const double support = support_height(belief, t.x, t.y);
            if (std::abs(t.z - support) > p.support_tolerance)
                return {false, "no supporting surface at target"};
            // Belief heights carry observation noise; allow the support
            // tolerance as slack so near-limit steps stay plannable. The
            // execution gate remains exact.
            if (t.z - belief.robot_pose.z >
                cs.max_climb_height + p.support_tolerance + 1e-9)
                return {false, "exceeds max climb"};
            return {true, {}};
        }
        case SkillKind::Navigate: {
            const HeightGrid g =
                HeightGrid::of_belief(belief, bounds, p.cell, p.robot_radius);
            if (grid_astar(g, belief.robot_pose, t, cs.max_climb_height)
                    .empty())
                return {false, "no path in belief"};
            return {true, {}};
        }
        case SkillKind::Push: {
            const BeliefEntry* e = belief.find(inv.object_id);
            if (!e) return {false, "unknown object: " + inv.object_id};
            if (e->object.kind != ObjectKind::Box || !e->object.movable)
                return {false, "object not movable by kind"};
            if (e->observed_movable.has_value() && !*e->observed_movable)
                return {false, "object observed immovable"};
            return {true, {}};
        }
    }
    return {false, "unknown skill"};
}

}  // namespace ainav
