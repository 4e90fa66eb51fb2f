#include "ainav/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "ainav/grid.hpp"

namespace ainav {

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_triplet(double x, double y, double z) {
    return "[" + fmt2(x) + ", " + fmt2(y) + ", " + fmt2(z) + "]";
}

// Outward normal and half extent of the face of `fp` nearest to `from`.
struct Face {
    double nx = 1.0;
    double ny = 0.0;
    double half = 0.0;  // extent from center to the face along the normal
};

Face face_toward(const Footprint& fp, double from_x, double from_y) {
    const double c = std::cos(fp.yaw), s = std::sin(fp.yaw);
    const Face faces[4] = {
        {c, s, fp.half_l},    // local +x
        {-c, -s, fp.half_l},  // local -x
        {-s, c, fp.half_w},   // local +y
        {s, -c, fp.half_w},   // local -y
    };
    const double dx = from_x - fp.cx, dy = from_y - fp.cy;
    int best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const double d = faces[i].nx * dx + faces[i].ny * dy;
        if (d > best_dot) {
            best_dot = d;
            best = i;
        }
    }
    return faces[best];
}

double half_extent_along(const Footprint& fp, double ux, double uy) {
    const double c = std::cos(fp.yaw), s = std::sin(fp.yaw);
    return fp.half_l * std::abs(ux * c + uy * s) +
           fp.half_w * std::abs(-ux * s + uy * c);
}

const BeliefEntry& require_entry(const BeliefState& belief,
                                 const std::string& id,
                                 const std::string& param) {
    const BeliefEntry* e = belief.find(id);
    if (!e)
        throw ResolveError("unknown object '" + id + "' in parameter '" +
                           param + "'");
    return *e;
}

double belief_goal_distance(const AgentContext& ctx,
                            const BeliefState& belief) {
    const HeightGrid g =
        HeightGrid::of_belief(belief, ctx.bounds, ctx.skill_params.cell,
                              ctx.skill_params.robot_radius);
    const auto d = grid_distance(g, belief.robot_pose, ctx.goal,
                                 ctx.constraints.max_climb_height);
    return d.has_value() ? *d : grid_unreachable_distance(g);
}

std::string plan_key(const SkillLevelPlan& plan) {
    std::string key;
    for (const auto& s : plan.steps) key += format_skill_call(s) + ";";
    return key;
}

std::string step_phrase(const PlanStep& s) {
    switch (s.skill) {
        case SkillKind::Walk:
            return "walk to " + s.symbolic_param;
        case SkillKind::Climb:
            return "climb onto " + s.symbolic_param;
        case SkillKind::Navigate:
            return "navigate to " + s.symbolic_param;
        case SkillKind::Push:
            return "push " + s.object_id + " to " + s.symbolic_param;
    }
    return "";
}

// Geometric strategy enumeration shared by both proposer stages, the
// advisor's what-if tree and the arborist. Deterministic: equal beliefs
// yield the same plans in the same order.
std::vector<SkillLevelPlan> enumerate_strategies(const AgentContext& ctx) {
    const BeliefState& b = ctx.belief;
    const SkillParams& p = ctx.skill_params;
    const double climb_lim =
        ctx.constraints.max_climb_height + p.support_tolerance;
    std::vector<SkillLevelPlan> out;

    const bool free = free_path_exists(b, ctx.bounds, ctx.constraints,
                                       b.robot_pose, ctx.goal, p.robot_radius,
                                       p.cell);

    // (a) Direct route when the believed scene admits one.
    if (free) {
        out.push_back({{PlanStep{SkillKind::Navigate, "goal", ""}}});
    }

    const auto ids = b.known_ids();
    const auto is_pushable = [&](const BeliefEntry& e) {
        return e.object.kind == ObjectKind::Box && e.object.movable &&
               !(e.observed_movable.has_value() && !*e.observed_movable);
    };

    // (b) Clear the lane: push a box out of the way, then go.
    if (!free) {
        for (const auto& id : ids) {
            const BeliefEntry& e = *b.find(id);
            if (!is_pushable(e)) continue;
            PlanStep push{SkillKind::Push, "push target for " + id, id};
            BeliefState b2 = b;
            Pose3 target;
            try {
                target = resolve_symbolic(ctx, b2, push);
            } catch (const ResolveError&) {
                continue;
            }
            b2.find(id)->object.pose.x = target.x;
            b2.find(id)->object.pose.y = target.y;
            if (!free_path_exists(b2, ctx.bounds, ctx.constraints,
                                  b2.robot_pose, ctx.goal, p.robot_radius,
                                  p.cell))
                continue;
            out.push_back(
                {{push, PlanStep{SkillKind::Navigate, "goal", ""}}});
        }
    }

    // (c) Stair chains: stack boxes against a tall structure and climb it.
    struct Chain {
        size_t size;
        double push_dist;
        std::string idkey;
        SkillLevelPlan plan;
    };
    std::vector<Chain> chains;
    for (const auto& oid : ids) {
        const BeliefEntry& target = *b.find(oid);
        // A box is push material, not terrain, until pushing proves it
        // immovable; from then on it counts as climbable structure.
        if (target.object.kind == ObjectKind::Box &&
            !(target.observed_movable.has_value() &&
              !*target.observed_movable))
            continue;
        const double top = target.object.top();
        if (top <= ctx.constraints.max_climb_height) continue;
        const bool goal_on =
            target.object.footprint().contains(ctx.goal.x, ctx.goal.y);
        if (free && !goal_on) continue;

        std::vector<const BeliefEntry*> steps;
        for (const auto& bid : ids) {
            const BeliefEntry& e = *b.find(bid);
            if (!is_pushable(e)) continue;
            steps.push_back(&e);
        }
        const Face face = face_toward(target.object.footprint(),
                                      b.robot_pose.x, b.robot_pose.y);
        const double fcx = target.object.pose.x + face.nx * face.half;
        const double fcy = target.object.pose.y + face.ny * face.half;

        std::vector<std::vector<const BeliefEntry*>> subsets;
        for (size_t i = 0; i < steps.size(); ++i) subsets.push_back({steps[i]});
        for (size_t i = 0; i < steps.size(); ++i)
            for (size_t j = i + 1; j < steps.size(); ++j)
                subsets.push_back({steps[i], steps[j]});

        for (auto subset : subsets) {
            std::sort(subset.begin(), subset.end(),
                      [](const BeliefEntry* a, const BeliefEntry* c) {
                          if (a->object.size.h != c->object.size.h)
                              return a->object.size.h < c->object.size.h;
                          return a->object.id < c->object.id;
                      });
            bool ok = true;
            double prev = 0.0;
            for (const BeliefEntry* e : subset) {
                if (e->object.size.h - prev > climb_lim) ok = false;
                prev = e->object.size.h;
            }
            if (top - prev > climb_lim || top <= prev) ok = false;
            if (!ok) continue;

            Chain c;
            c.size = subset.size();
            c.push_dist = 0.0;
            SkillLevelPlan plan;
            // Pushes place the tallest step flush against the structure
            // first; climbs then ascend.
            for (auto it = subset.rbegin(); it != subset.rend(); ++it) {
                const BeliefEntry* e = *it;
                plan.steps.push_back(PlanStep{SkillKind::Push,
                                              "stair slot against " + oid,
                                              e->object.id});
                const double slot_half = half_extent_along(
                    e->object.footprint(), face.nx, face.ny);
                c.push_dist += distance_xy(
                    e->object.pose.x, e->object.pose.y,
                    fcx + face.nx * slot_half, fcy + face.ny * slot_half);
            }
            for (const BeliefEntry* e : subset) {
                plan.steps.push_back(PlanStep{
                    SkillKind::Climb, "top of " + e->object.id, ""});
                c.idkey += e->object.id + ",";
            }
            plan.steps.push_back(
                PlanStep{SkillKind::Climb, "top of " + oid, ""});
            plan.steps.push_back(PlanStep{SkillKind::Navigate, "goal", ""});
            c.plan = std::move(plan);
            chains.push_back(std::move(c));
        }
    }
    std::stable_sort(chains.begin(), chains.end(),
                     [](const Chain& a, const Chain& b2) {
                         if (a.size != b2.size) return a.size < b2.size;
                         if (a.push_dist != b2.push_dist)
                             return a.push_dist < b2.push_dist;
                         return a.idkey < b2.idkey;
                     });
    for (auto& c : chains) out.push_back(std::move(c.plan));

    // (d) Decoy fillers: single approach steps toward known objects. A
    // standoff the robot already (nearly) occupies displaces the sensor too
    // little to reveal anything, so such decoys are dropped.
    for (const auto& id : ids) {
        PlanStep walk{SkillKind::Walk, "front of " + id, ""};
        BeliefState b2 = b;
        try {
            const Pose3 t = resolve_symbolic(ctx, b2, walk);
            if (distance_xy(b.robot_pose, t) < 2.0 * p.robot_radius) continue;
        } catch (const ResolveError&) {
            continue;
        }
        out.push_back({{walk}});
    }

    // Drop textual duplicates, preserving order.
    std::vector<SkillLevelPlan> unique;
    std::set<std::string> seen;
    for (auto& plan : out) {
        if (seen.insert(plan_key(plan)).second)
            unique.push_back(std::move(plan));
    }
    return unique;
}

void mark_dead(const PlanTree& tree, int node_id,
               std::map<int, NodeScore>& scores) {
    scores[node_id] = {0.0, false};
    for (int c : tree.node(node_id).children)
        if (tree.node(c).status != NodeStatus::Pruned)
            mark_dead(tree, c, scores);
}

void eval_dfs(const AgentContext& ctx, const PlanTree& tree, int node_id,
              const BeliefState& belief, std::map<int, NodeScore>& scores) {
    for (int c : tree.node(node_id).children) {
        const PlanNode& n = tree.node(c);
        if (n.status == NodeStatus::Pruned) continue;
        BeliefState b2 = belief;
        const double d_before = belief_goal_distance(ctx, belief);
        if (!simulate_step(ctx, b2, n.step)) {
            // Nothing below an inexecutable step can run either; the whole
            // subtree is scored dead so complete annotation stays complete.
            mark_dead(tree, c, scores);
            continue;
        }
        const double d_after = belief_goal_distance(ctx, b2);
        double prog = (d_before - d_after) / std::max(d_before, 1e-9);
        prog = std::clamp(prog, 0.0, 1.0);
        const double r =
            0.5 * prog + 0.5 * (1.0 - skill_difficulty(n.step.skill));
        scores[c] = {r, true};
        eval_dfs(ctx, tree, c, b2, scores);
    }
}

void goal_leaf_dfs(const AgentContext& ctx, const PlanTree& tree, int node_id,
                   const BeliefState& belief, std::vector<int>& leaves) {
    for (int c : tree.node(node_id).children) {
        const PlanNode& n = tree.node(c);
        if (n.status == NodeStatus::Pruned) continue;
        BeliefState b2 = belief;
        if (!simulate_step(ctx, b2, n.step)) continue;
        bool leaf = true;
        for (int gc : n.children)
            if (tree.node(gc).status != NodeStatus::Pruned) leaf = false;
        if (leaf) {
            if (is_goal_reached(b2.robot_pose, ctx.goal, 0.3,
                                ctx.constraints.max_climb_height))
                leaves.push_back(c);
        } else {
            goal_leaf_dfs(ctx, tree, c, b2, leaves);
        }
    }
}

// Remaining Selected chain strictly below `anchor`, in execution order.
std::vector<int> selected_below(const PlanTree& tree, int anchor) {
    std::vector<int> out;
    int cur = anchor;
    while (true) {
        int next = -1;
        for (int c : tree.node(cur).children) {
            if (tree.node(c).status == NodeStatus::Selected) {
                next = c;
                break;
            }
        }
        if (next < 0) break;
        out.push_back(next);
        cur = next;
    }
    return out;
}

}  // namespace

double skill_difficulty(SkillKind k) {
    switch (k) {
        case SkillKind::Walk:
            return 0.1;
        case SkillKind::Navigate:
            return 0.2;
        case SkillKind::Climb:
            return 0.5;
        case SkillKind::Push:
            return 0.6;
    }
    return 0.5;
}

std::optional<std::string> symbolic_object_id(const std::string& param) {
    static const char* prefixes[] = {
        "top of ",     "front of ",       "behind ",
        "left of ",    "right of ",       "push target for ",
        "stair slot against ",
    };
    for (const char* p : prefixes) {
        const std::string prefix(p);
        if (param.rfind(prefix, 0) == 0 && param.size() > prefix.size())
            return param.substr(prefix.size());
    }
    return std::nullopt;
}

AgentContext AgentContext::from_belief(const BeliefState& belief,
                                       const Bounds& bounds,
                                       const ConstraintSet& cs,
                                       const SkillParams& params) {
    AgentContext ctx;
    ctx.goal = belief.goal;
    ctx.constraints = cs;
    ctx.bounds = bounds;
    ctx.belief = belief;
    ctx.skill_params = params;
    ctx.skill_library = {
        "walk-to(target position)",
        "climb-to(target position)",
        "navigate-to(target position)",
        "push-to(object id, target position)",
    };

    const auto ids = belief.known_ids();
    std::ostringstream summary;
    summary << "The robot is at "
            << fmt_triplet(belief.robot_pose.x, belief.robot_pose.y,
                           belief.robot_pose.z)
            << " with yaw " << fmt2(belief.robot_pose.yaw)
            << " rad. The goal point is "
            << fmt_triplet(belief.goal.x, belief.goal.y, belief.goal.z) << ". "
            << ids.size() << " objects are currently known.";
    ctx.scene_summary = summary.str();

    if (ids.empty()) {
        ctx.object_descriptions = "none";
    } else {
        std::ostringstream desc;
        bool first = true;
        for (const auto& id : ids) {
            const BeliefEntry& e = *belief.find(id);
            if (!first) desc << "\n";
            first = false;
            desc << id << ": kind " << to_string(e.object.kind)
                 << ", position "
                 << fmt_triplet(e.object.pose.x, e.object.pose.y,
                                e.object.pose.z)
                 << ", size "
                 << fmt_triplet(e.object.size.l, e.object.size.w,
                                e.object.size.h)
                 << ", ";
            if (!e.object.movable) {
                desc << "fixed";
            } else if (e.observed_movable.has_value()) {
                desc << (*e.observed_movable
                             ? "movable, confirmed by pushing"
                             : "movable by kind, observed immovable");
            } else {
                desc << "movable";
            }
        }
        ctx.object_descriptions = desc.str();
    }
    return ctx;
}

Pose3 resolve_symbolic(const AgentContext& ctx, const BeliefState& belief,
                       const PlanStep& step) {
    const std::string& param = step.symbolic_param;
    const SkillParams& p = ctx.skill_params;
    const Pose3& robot = belief.robot_pose;

    if (param == "goal") return ctx.goal;

    if (param == "frontier toward goal") {
        const HeightGrid g = HeightGrid::of_belief(belief, ctx.bounds, p.cell,
                                                   p.robot_radius);
        const auto frontier = grid_frontier_toward(
            g, robot, ctx.goal, ctx.constraints.max_climb_height);
        if (!frontier) throw ResolveError("no reachable frontier");
        Pose3 out = *frontier;
        out.yaw = std::atan2(ctx.goal.y - out.y, ctx.goal.x - out.x);
        return out;
    }

    if (param.rfind("top of ", 0) == 0) {
        const std::string id = param.substr(7);
        const BeliefEntry& e = require_entry(belief, id, param);
        const Footprint fp = e.object.footprint();
        Pose3 out{e.object.pose.x, e.object.pose.y, e.object.top(), 0.0};
        if (distance_xy(robot, out) > p.climb_reach) {
            // Center out of reach: aim at the nearest point of the top face,
            // inset so the body lands fully on it.
            const double c = std::cos(fp.yaw), s = std::sin(fp.yaw);
            const double dx = robot.x - fp.cx, dy = robot.y - fp.cy;
            const double lx = dx * c + dy * s, ly = -dx * s + dy * c;
            const double mx = std::max(0.0, fp.half_l - 0.2);
            const double my = std::max(0.0, fp.half_w - 0.2);
            const double cx = std::clamp(lx, -mx, mx);
            const double cy = std::clamp(ly, -my, my);
            out.x = fp.cx + cx * c - cy * s;
            out.y = fp.cy + cx * s + cy * c;
        }
        out.yaw = std::atan2(out.y - robot.y, out.x - robot.x);
        if (distance_xy(robot, out) < 1e-9) out.yaw = robot.yaw;
        return out;
    }

    const auto side_point = [&](const std::string& id, int rotation) {
        const BeliefEntry& e = require_entry(belief, id, param);
        const Footprint fp = e.object.footprint();
        Face f = face_toward(fp, robot.x, robot.y);
        for (int i = 0; i < rotation; ++i) {
            const double nx = -f.ny, ny = f.nx;  // +90 degrees ccw
            f.nx = nx;
            f.ny = ny;
            f.half = half_extent_along(fp, f.nx, f.ny);
        }
        const double standoff = f.half + p.robot_radius + 0.2;
        Pose3 out;
        out.x = fp.cx + f.nx * standoff;
        out.y = fp.cy + f.ny * standoff;
        out.z = support_height(belief, out.x, out.y);
        out.yaw = std::atan2(-f.ny, -f.nx);  // facing the object
        return out;
    };
    if (param.rfind("front of ", 0) == 0) return side_point(param.substr(9), 0);
    if (param.rfind("left of ", 0) == 0) return side_point(param.substr(8), 1);
    if (param.rfind("behind ", 0) == 0) return side_point(param.substr(7), 2);
    if (param.rfind("right of ", 0) == 0) return side_point(param.substr(9), 3);

    if (param.rfind("push target for ", 0) == 0) {
        const std::string id = param.substr(16);
        const BeliefEntry& e = require_entry(belief, id, param);
        const double dx = ctx.goal.x - e.object.pose.x;
        const double dy = ctx.goal.y - e.object.pose.y;
        double ux = 0.0, uy = 0.0;
        if (std::abs(dx) >= std::abs(dy))
            ux = dx >= 0.0 ? 1.0 : -1.0;
        else
            uy = dy >= 0.0 ? 1.0 : -1.0;
        constexpr double kPushDistance = 1.5;
        Pose3 out;
        out.x = e.object.pose.x + ux * kPushDistance;
        out.y = e.object.pose.y + uy * kPushDistance;
        out.z = e.object.pose.z;
        out.yaw = std::atan2(uy, ux);
        return out;
    }

    if (param.rfind("stair slot against ", 0) == 0) {
        const std::string id = param.substr(19);
        const BeliefEntry& target = require_entry(belief, id, param);
        if (step.object_id.empty())
            throw ResolveError("stair slot requires a pushed object");
        const BeliefEntry& box =
            require_entry(belief, step.object_id, param);
        const Footprint tfp = target.object.footprint();
        const Face face = face_toward(tfp, robot.x, robot.y);
        const Footprint bfp = box.object.footprint();
        const double box_half = half_extent_along(bfp, face.nx, face.ny);
        const double fx = tfp.cx + face.nx * face.half;
        const double fy = tfp.cy + face.ny * face.half;
        for (int k = 0; k < 6; ++k) {
            const double off = box_half * (2.0 * k + 1.0);
            Footprint cand = bfp;
            cand.cx = fx + face.nx * off;
            cand.cy = fy + face.ny * off;
            bool clear = true;
            for (const auto& [x, y] : cand.corners())
                if (!ctx.bounds.contains(x, y)) clear = false;
            for (const auto& oid : belief.known_ids()) {
                if (oid == step.object_id) continue;
                if (footprints_overlap(cand,
                                       belief.find(oid)->object.footprint()))
                    clear = false;
            }
            if (!clear) continue;
            return Pose3{cand.cx, cand.cy, box.object.pose.z, 0.0};
        }
        throw ResolveError("no clear stair slot against " + id);
    }

    throw ResolveError("unresolvable symbolic parameter: " + param);
}

bool simulate_step(const AgentContext& ctx, BeliefState& belief,
                   const PlanStep& step) {
    Pose3 target;
    try {
        target = resolve_symbolic(ctx, belief, step);
    } catch (const ResolveError&) {
        return false;
    }
    SkillInvocation inv{step.skill, step.symbolic_param, target,
                        step.object_id};
    const auto verdict = skill_feasible(inv, belief, ctx.bounds,
                                        ctx.constraints, ctx.skill_params);
    if (!verdict.feasible) return false;

    if (step.skill == SkillKind::Push) {
        BeliefEntry* e = belief.find(step.object_id);
        const double sx = e->object.pose.x, sy = e->object.pose.y;
        const double total = distance_xy(sx, sy, target.x, target.y);
        e->object.pose.x = target.x;
        e->object.pose.y = target.y;
        if (total > 1e-9) {
            const double ux = (target.x - sx) / total;
            const double uy = (target.y - sy) / total;
            const double standoff =
                half_extent_along(e->object.footprint(), ux, uy) +
                ctx.skill_params.robot_radius + 0.2;
            belief.robot_pose.x = target.x - ux * standoff;
            belief.robot_pose.y = target.y - uy * standoff;
            belief.robot_pose.yaw = std::atan2(uy, ux);
        }
        belief.robot_pose.z =
            support_height(belief, belief.robot_pose.x, belief.robot_pose.y);
    } else {
        const double moved = distance_xy(belief.robot_pose, target);
        if (moved > 1e-9)
            belief.robot_pose.yaw = std::atan2(target.y - belief.robot_pose.y,
                                               target.x - belief.robot_pose.x);
        belief.robot_pose.x = target.x;
        belief.robot_pose.y = target.y;
        belief.robot_pose.z = target.z;
    }
    return true;
}

std::vector<std::vector<int>> anchor_leaf_paths(const PlanTree& tree,
                                                int anchor) {
    std::vector<std::vector<int>> paths;
    std::vector<int> cur;
    const auto dfs = [&](auto&& self, int id) -> void {
        bool leaf = true;
        for (int c : tree.node(id).children) {
            if (tree.node(c).status == NodeStatus::Pruned) continue;
            leaf = false;
            cur.push_back(c);
            self(self, c);
            cur.pop_back();
        }
        if (leaf && !cur.empty()) paths.push_back(cur);
    };
    dfs(dfs, anchor);
    return paths;
}

std::vector<int> compute_goal_leaves(const AgentContext& ctx,
                                     const PlanTree& tree, int anchor) {
    std::vector<int> leaves;
    goal_leaf_dfs(ctx, tree, anchor, ctx.belief, leaves);
    return leaves;
}

std::vector<ObjectLevelPlan> RuleBasedBackend::propose_object_level(
    const AgentContext& ctx, int n_plans) {
    const auto plans = enumerate_strategies(ctx);
    std::vector<ObjectLevelPlan> out;
    for (const auto& plan : plans) {
        if (static_cast<int>(out.size()) >= n_plans) break;
        ObjectLevelPlan obj;
        obj.plan_id = static_cast<int>(out.size()) + 1;
        static const char* ordinals[] = {"First",  "Second", "Third",
                                         "Fourth", "Fifth",  "Sixth"};
        std::string text;
        std::set<std::string> used;
        for (size_t i = 0; i < plan.steps.size(); ++i) {
            const char* lead =
                i < 6 ? ordinals[i] : "Then";
            text += std::string(i == 0 ? "" : " ") + lead + ", " +
                    step_phrase(plan.steps[i]) + ".";
            if (!plan.steps[i].object_id.empty())
                used.insert(plan.steps[i].object_id);
            if (auto ref = symbolic_object_id(plan.steps[i].symbolic_param))
                used.insert(*ref);
        }
        obj.narrative = text;
        obj.objects_used.assign(used.begin(), used.end());
        out.push_back(std::move(obj));
    }
    return out;
}

std::vector<SkillLevelPlan> RuleBasedBackend::propose_skill_level(
    const AgentContext& ctx, const std::vector<ObjectLevelPlan>& object_plans,
    int n_plans) {
    // Both stages derive from one geometric enumeration, so the skill stage
    // restates the object stage rather than re-deriving from its text.
    (void)object_plans;
    auto plans = enumerate_strategies(ctx);
    if (static_cast<int>(plans.size()) > n_plans) plans.resize(n_plans);
    return plans;
}

std::map<int, NodeScore> RuleBasedBackend::evaluate_tree(
    const AgentContext& ctx, const PlanTree& tree, int anchor) {
    std::map<int, NodeScore> scores;
    eval_dfs(ctx, tree, anchor, ctx.belief, scores);
    return scores;
}

Pose3 RuleBasedBackend::resolve(const AgentContext& ctx,
                                const PlanStep& step) {
    return resolve_symbolic(ctx, ctx.belief, step);
}

Interpretation RuleBasedBackend::advise(const AgentContext& ctx,
                                        const PlanTree& tree, int anchor,
                                        const AdviceEvent& event) {
    Interpretation out;
    out.kind = event.kind;
    out.node_id = event.node_id;
    out.object_id = event.object_id;
    out.detail = event.detail;

    switch (event.kind) {
        case AdviceEvent::Kind::Failure: {
            out.replan = true;
            out.suggestions =
                "Abandon the failed branch: prune node " +
                std::to_string(event.node_id) +
                " and select the best remaining alternative; if none "
                "remains, propose fresh plans from the current state. "
                "Failure detail: " +
                event.detail;
            return out;
        }
        case AdviceEvent::Kind::NewObject: {
            // Current value: best surviving option under the anchor.
            double cur = -std::numeric_limits<double>::infinity();
            for (int c : tree.node(anchor).children)
                if (tree.node(c).status != NodeStatus::Pruned)
                    cur = std::max(cur, tree.node(c).q);

            auto plans = enumerate_strategies(ctx);
            if (static_cast<int>(plans.size()) > 5) plans.resize(5);
            if (plans.empty()) {
                out.replan = false;
                out.suggestions =
                    "The new object enables no additional plan.";
                return out;
            }
            PlanTree tmp = PlanTree::build(plans, tree.gamma());
            tmp.annotate(evaluate_tree(ctx, tmp, PlanTree::kRoot),
                         compute_goal_leaves(ctx, tmp, PlanTree::kRoot));
            tmp.backpropagate();
            double best = -std::numeric_limits<double>::infinity();
            int best_id = -1;
            for (int c : tmp.node(PlanTree::kRoot).children) {
                if (tmp.node(c).status == NodeStatus::Pruned) continue;
                if (tmp.node(c).q > best) {
                    best = tmp.node(c).q;
                    best_id = c;
                }
            }
            out.replan = best_id >= 0 && best > cur + replan_margin;
            if (out.replan) {
                out.suggestions =
                    "Replan around " + event.object_id + ": starting with '" +
                    format_skill_call(tmp.node(best_id).step) +
                    "' now scores " + fmt2(best) +
                    ", beating the current plan's " + fmt2(cur) + ".";
            } else {
                out.suggestions =
                    "Keep the current plan; the best alternative using " +
                    event.object_id + " does not clear the margin.";
            }
            return out;
        }
        case AdviceEvent::Kind::Revaluation: {
            BeliefState sim = ctx.belief;
            for (int id : selected_below(tree, anchor)) {
                const PlanStep& step = tree.node(id).step;
                if (!simulate_step(ctx, sim, step)) {
                    out.replan = true;
                    out.node_id = id;
                    out.suggestions =
                        "Re-measured " + event.object_id +
                        " invalidates the remaining plan: step '" +
                        format_skill_call(step) +
                        "' is no longer feasible; prune it and "
                        "re-select.";
                    return out;
                }
            }
            out.replan = false;
            out.suggestions =
                "The updated measurement of " + event.object_id +
                " leaves every remaining step feasible.";
            return out;
        }
    }
    return out;
}

std::vector<SkillLevelPlan> RuleBasedBackend::arborist_additions(
    const AgentContext& ctx, const PlanTree& tree, int anchor,
    const Interpretation& interp) {
    (void)tree;
    (void)anchor;
    (void)interp;
    auto plans = enumerate_strategies(ctx);
    if (plans.size() > 5) plans.resize(5);
    return plans;
}

std::vector<SkillLevelPlan> propose(PlanningBackend& backend,
                                    const AgentContext& ctx, int n_plans,
                                    bool skip_object_stage) {
    std::vector<ObjectLevelPlan> object_plans;
    if (!skip_object_stage)
        object_plans = backend.propose_object_level(ctx, n_plans);
    auto plans = backend.propose_skill_level(ctx, object_plans, n_plans);

    std::vector<SkillLevelPlan> kept;
    std::set<std::string> seen;
    for (auto& plan : plans) {
        if (plan.steps.empty()) continue;
        bool known = true;
        for (const auto& step : plan.steps) {
            if (!step.object_id.empty() && !ctx.belief.find(step.object_id))
                known = false;
            if (auto ref = symbolic_object_id(step.symbolic_param))
                if (!ctx.belief.find(*ref)) known = false;
        }
        if (!known) continue;  // hallucinated object reference
        if (!seen.insert(plan_key(plan)).second) continue;
        kept.push_back(std::move(plan));
        if (static_cast<int>(kept.size()) >= n_plans) break;
    }
    if (kept.empty()) throw EmptyProposal("no usable plans proposed");
    return kept;
}

}  // namespace ainav
