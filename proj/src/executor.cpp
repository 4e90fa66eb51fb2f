#include "ainav/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <utility>

#include "json.hpp"

#include "ainav/remote.hpp"
#include "ainav/skills.hpp"

namespace ainav {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

Json pose_json(const Pose3& p) { return Json::array({p.x, p.y, p.z}); }

std::string cause_name(const std::optional<FailureCause>& c) {
    return c ? to_string(*c) : std::string{"none"};
}

}  // namespace

std::string to_string(Ablation a) {
    switch (a) {
        case Ablation::None: return "none";
        case Ablation::Single: return "single";
        case Ablation::SkillOnly: return "skill";
        case Ablation::NoReplan: return "noreplan";
        case Ablation::FailureOnly: return "failureonly";
    }
    return "none";
}

Ablation ablation_from_string(const std::string& s) {
    if (s == "none") return Ablation::None;
    if (s == "single") return Ablation::Single;
    if (s == "skill" || s == "skillonly") return Ablation::SkillOnly;
    if (s == "noreplan") return Ablation::NoReplan;
    if (s == "failureonly") return Ablation::FailureOnly;
    throw std::invalid_argument("unknown ablation: " + s);
}

std::string to_string(FailureClass c) {
    switch (c) {
        case FailureClass::SceneUnderstandingError:
            return "SceneUnderstandingError";
        case FailureClass::IncorrectTaskDecomposition:
            return "IncorrectTaskDecomposition";
        case FailureClass::SkillExecutionUnfinished:
            return "SkillExecutionUnfinished";
        case FailureClass::IntraSkillFailure:
            return "IntraSkillFailure";
        case FailureClass::SkillTransitionFailure:
            return "SkillTransitionFailure";
    }
    return "IntraSkillFailure";
}

FailureClass classify_failure(const FailureEvidence& e) {
    // Precedence: panics, then budget crossings mid-skill, then invalid
    // climb handoffs, then ignorance of the scene, then decomposition
    // churn; everything else is a plain skill failure.
    if (e.panicked) return FailureClass::IntraSkillFailure;
    if (e.budget_crossed_mid_skill)
        return FailureClass::SkillExecutionUnfinished;
    if (e.has_last_failure && e.last_skill == SkillKind::Climb &&
        e.last_cause && *e.last_cause == FailureCause::Infeasible &&
        e.last_elapsed <= 1e-12)
        return FailureClass::SkillTransitionFailure;
    if (!e.interaction_executed && e.known_objects < e.world_objects)
        return FailureClass::SceneUnderstandingError;
    if (e.plan_exhausted || e.replans >= 3)
        return FailureClass::IncorrectTaskDecomposition;
    return FailureClass::IntraSkillFailure;
}

std::string EpisodeResult::trace_ndjson() const {
    std::string out;
    for (const auto& e : trace) {
        Json j;
        j["t"] = e.t;
        j["kind"] = e.kind;
        j.update(Json::parse(e.payload));
        out += j.dump();
        out += '\n';
    }
    return out;
}

namespace {

// One episode's mutable state; run() drives the observe-plan-execute-advise
// loop until a terminate event is recorded.
class Runner {
  public:
    Runner(const Scenario& scenario, PlanningBackend& backend,
           const EpisodeConfig& cfg)
        : sc_(scenario),
          backend_(backend),
          cfg_(cfg),
          world_(scenario),
          belief_(make_initial_belief(scenario)),
          rng_(cfg.seed),
          tree_(cfg.gamma),
          last_pose_(scenario.robot_start),
          modeled_(backend.name() != "remote") {}

    EpisodeResult run() {
        try {
            run_inner();
        } catch (const RemoteError& e) {
            if (!done_) terminate_error(std::string("backend error: ") + e.what());
        } catch (const std::exception& e) {
            if (!done_) {
                res_.evidence.panicked = true;
                terminate_failure(std::string("internal error: ") + e.what());
            }
        }
        res_.overall_time = t_;
        return std::move(res_);
    }

  private:
    // --- small accessors -------------------------------------------------
    double budget() const { return sc_.constraints.sim_time_budget; }
    int n_plans() const {
        return cfg_.ablation == Ablation::Single ? 1 : cfg_.n_plans;
    }
    bool skip_objects() const { return cfg_.ablation == Ablation::SkillOnly; }
    bool replan_enabled() const { return cfg_.ablation != Ablation::NoReplan; }
    bool delta_advice() const {
        return replan_enabled() && cfg_.ablation != Ablation::FailureOnly;
    }
    AgentContext ctx() const {
        return AgentContext::from_belief(belief_, sc_.bounds, sc_.constraints,
                                         cfg_.skills);
    }

    void trace(const char* kind, const Json& payload) {
        res_.trace.push_back(TraceEvent{t_, kind, payload.dump()});
    }

    void add_planning(double dt) {
        res_.planning_time += dt;
        if (cfg_.accounting == TimeAccounting::PlanningCounts) t_ += dt;
    }

    // Modeled backends cost planning_cost_s per call; remote backends are
    // charged their measured wall-clock latency.
    template <class F>
    auto charged(int modeled_calls, F&& f) {
        if (modeled_) {
            auto r = f();
            add_planning(modeled_calls * cfg_.planning_cost_s);
            return r;
        }
        const auto t0 = std::chrono::steady_clock::now();
        auto r = f();
        add_planning(std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count());
        return r;
    }

    // --- sensing ----------------------------------------------------------
    ObservationDelta sense() {
        return observe(world_, belief_, cfg_.fov, rng_, t_, cfg_.noise_k);
    }

    // Post-failure diagnostic sweep: turning in place is free at this
    // granularity, so a failed skill earns a full-circle look before the
    // advisor interprets the failure.
    ObservationDelta survey() {
        FovParams all = cfg_.fov;
        all.half_angle = kPi;
        return observe(world_, belief_, all, rng_, t_, cfg_.noise_k);
    }

    void trace_observe(const std::vector<ObservationDelta::Entry>& entries) {
        Json nw = Json::array();
        Json up = Json::array();
        for (const auto& e : entries)
            (e.flag == ObservationDelta::Flag::New ? nw : up).push_back(e.id);
        trace("observe", Json{{"new", nw}, {"updated", up}});
    }

    std::string describe_delta(const ObservationDelta::Entry& e) const {
        if (e.flag == ObservationDelta::Flag::New)
            return "first sighting of " + e.id + " at " + fmt2(e.distance) +
                   " m";
        const BeliefEntry* be = belief_.find(e.id);
        std::string size = be ? "[" + fmt2(be->object.size.l) + ", " +
                                    fmt2(be->object.size.w) + ", " +
                                    fmt2(be->object.size.h) + "]"
                              : "[unknown]";
        return "re-measured " + e.id + " at " + fmt2(e.distance) +
               " m: size now " + size;
    }

    // --- planning ---------------------------------------------------------
    bool annotate_from(const AgentContext& c, int at, bool complete) {
        // Stale bonuses below the re-evaluated subtree would keep paying for
        // goal states the current belief no longer predicts.
        reset_bonus_below(at);
        auto scores =
            charged(1, [&] { return backend_.evaluate_tree(c, tree_, at); });
        try {
            tree_.annotate(scores, compute_goal_leaves(c, tree_, at),
                           cfg_.terminal_bonus, complete);
        } catch (const TreeError&) {
            return false;
        }
        tree_.backpropagate();
        return true;
    }

    void reset_bonus_below(int at) {
        for (int c : tree_.node(at).children) {
            if (tree_.node(c).status == NodeStatus::Pruned) continue;
            tree_.node(c).terminal_bonus = 0.0;
            reset_bonus_below(c);
        }
    }

    bool reselect() {
        try {
            skeleton_ = tree_.select_skeleton(anchor_);
        } catch (const TreeError&) {
            return false;
        }
        idx_ = 0;
        trace("select", Json{{"anchor", anchor_}, {"skeleton", skeleton_}});
        return true;
    }

    // Fresh proposal from the current state; rebuilds the tree.
    bool plan_fresh() {
        const AgentContext c = ctx();
        std::vector<SkillLevelPlan> plans;
        try {
            plans = charged(skip_objects() ? 1 : 2, [&] {
                return propose(backend_, c, n_plans(), skip_objects());
            });
        } catch (const EmptyProposal&) {
            return false;
        } catch (const RemoteError& e) {
            if (e.kind != RemoteError::Kind::Parse) throw;
            return false;
        }
        tree_ = PlanTree::build(plans, cfg_.gamma);
        anchor_ = PlanTree::kRoot;
        if (!annotate_from(c, PlanTree::kRoot, true)) return false;
        trace("plan",
              Json{{"plans", plans.size()}, {"nodes", tree_.size()}});
        return reselect();
    }

    // Grafts suffix plans under the anchor and re-scores that subtree.
    bool graft(const AgentContext& c, std::vector<SkillLevelPlan> plans) {
        if (static_cast<int>(plans.size()) > n_plans())
            plans.resize(static_cast<std::size_t>(n_plans()));
        auto ids = tree_.add_subtree(anchor_, plans);
        if (!ids.empty()) {
            if (!annotate_from(c, anchor_, false)) return false;
            trace("plan", Json{{"plans", plans.size()},
                               {"nodes", tree_.size()},
                               {"added", ids.size()}});
        }
        return reselect();
    }

    bool extend_with_arborist(const Interpretation& interp) {
        const AgentContext c = ctx();
        std::vector<SkillLevelPlan> adds;
        try {
            adds = charged(1, [&] {
                return backend_.arborist_additions(c, tree_, anchor_, interp);
            });
        } catch (const RemoteError& e) {
            if (e.kind != RemoteError::Kind::Parse) throw;
        }
        return graft(c, std::move(adds));
    }

    bool extend_with_fresh_proposals() {
        const AgentContext c = ctx();
        std::vector<SkillLevelPlan> plans;
        try {
            plans = charged(skip_objects() ? 1 : 2, [&] {
                return propose(backend_, c, n_plans(), skip_objects());
            });
        } catch (const EmptyProposal&) {
            return false;
        } catch (const RemoteError& e) {
            if (e.kind != RemoteError::Kind::Parse) throw;
            return false;
        }
        return graft(c, std::move(plans));
    }

    // --- revision ---------------------------------------------------------
    // A failed node always leaves the tree; the advice shapes the arborist
    // prompt rather than vetoing the prune (its subtree assumed success).
    void revise_failure(int node_id, const Interpretation& interp) {
        tree_.prune_node(node_id);
        trace("revise", Json{{"action", "prune"}, {"node", node_id}});
        if (reselect()) return;
        if (extend_with_arborist(interp)) return;
        exhausted();
    }

    void revise_delta(const Interpretation& interp) {
        if (interp.node_id > PlanTree::kRoot && tree_.has_node(interp.node_id) &&
            tree_.node(interp.node_id).status != NodeStatus::Pruned) {
            tree_.prune_node(interp.node_id);
            trace("revise",
                  Json{{"action", "prune"}, {"node", interp.node_id}});
        }
        if (extend_with_arborist(interp)) return;
        exhausted();
    }

    // Plan space exhausted at the current belief: scouting toward the
    // frontier may reveal enablers outside the field of view.
    void exhausted() {
        if (replan_enabled() && scouts_used_ < cfg_.max_scouts &&
            t_ < budget() - 1e-9) {
            ++scouts_used_;
            scout();
            if (done_) return;
            reproposals_ = 0;  // the scout earns a fresh repropose budget
            if (plan_fresh()) return;
            exhausted();
            return;
        }
        res_.evidence.plan_exhausted = true;
        terminate_failure("no viable plan");
    }

    void scout() {
        PlanStep step;
        step.skill = SkillKind::Navigate;
        step.symbolic_param = "frontier toward goal";
        trace("revise", Json{{"action", "scout"}, {"round", scouts_used_}});
        Pose3 target;
        try {
            target = resolve_symbolic(ctx(), belief_, step);
        } catch (const ResolveError&) {
            return;  // nothing left to explore
        }
        SkillInvocation inv;
        inv.skill = SkillKind::Navigate;
        inv.symbolic_param = step.symbolic_param;
        inv.resolved_target = target;
        SenseHook hook = [&](double now) {
            return !observe(world_, belief_, cfg_.fov, rng_, now, cfg_.noise_k)
                        .empty();
        };
        trace("execute", Json{{"node", -1},
                              {"skill", "navigate"},
                              {"param", step.symbolic_param},
                              {"target", pose_json(target)}});
        SkillOutcome out = execute_skill(world_, belief_, inv, sc_.constraints,
                                         cfg_.skills, t_, hook);
        t_ += out.elapsed_sim_time;
        res_.execution_time += out.elapsed_sim_time;
        accumulate_trajectory(out);
        trace("outcome", Json{{"node", -1},
                              {"status", out.success() ? "success" : "failure"},
                              {"cause", cause_name(out.failure_cause)},
                              {"elapsed", out.elapsed_sim_time},
                              {"detail", out.detail}});
        if (is_goal_reached(world_.robot, sc_.goal, cfg_.goal_tolerance,
                            sc_.constraints.max_climb_height)) {
            terminate_success();
            return;
        }
        trace_observe(sense().entries);
    }

    // --- execution --------------------------------------------------------
    void execute_node(int node_id) {
        const PlanStep step = tree_.node(node_id).step;
        SkillInvocation inv = SkillInvocation::of(step);

        std::string resolve_err;
        try {
            inv.resolved_target =
                charged(1, [&] { return backend_.resolve(ctx(), step); });
        } catch (const ResolveError& e) {
            resolve_err = e.what();
        } catch (const RemoteError& e) {
            if (e.kind != RemoteError::Kind::Parse) throw;
            resolve_err = e.what();
        }

        std::vector<ObservationDelta::Entry> pending;
        SenseHook hook = [&](double now) {
            ObservationDelta d =
                observe(world_, belief_, cfg_.fov, rng_, now, cfg_.noise_k);
            pending.insert(pending.end(), d.entries.begin(), d.entries.end());
            return !d.empty();
        };

        trace("execute",
              Json{{"node", node_id},
                   {"skill", to_string(step.skill)},
                   {"param", step.symbolic_param},
                   {"target", inv.resolved_target
                                  ? pose_json(*inv.resolved_target)
                                  : Json(nullptr)}});

        const double t_before = t_;
        SkillOutcome out;
        if (!resolve_err.empty()) {
            out.status = SkillOutcome::Status::Failure;
            out.failure_cause = FailureCause::Infeasible;
            out.detail = "unresolved target: " + resolve_err;
        } else {
            out = execute_skill(world_, belief_, inv, sc_.constraints,
                                cfg_.skills, t_, hook);
            t_ += out.elapsed_sim_time;
            res_.execution_time += out.elapsed_sim_time;
            accumulate_trajectory(out);
            if ((step.skill == SkillKind::Climb ||
                 step.skill == SkillKind::Push) &&
                (out.success() || out.elapsed_sim_time > 0.0))
                res_.evidence.interaction_executed = true;
        }
        trace("outcome",
              Json{{"node", node_id},
                   {"status", out.success() ? "success" : "failure"},
                   {"cause", cause_name(out.failure_cause)},
                   {"elapsed", out.elapsed_sim_time},
                   {"detail", out.detail}});

        if (out.success()) {
            res_.evidence.has_last_failure = false;
            tree_.node(node_id).status = NodeStatus::Executed;
            anchor_ = node_id;
            ++res_.skills_executed;
            ++idx_;
        } else {
            auto& ev = res_.evidence;
            ev.has_last_failure = true;
            ev.last_skill = step.skill;
            ev.last_cause = out.failure_cause;
            ev.last_elapsed = out.elapsed_sim_time;
            ev.last_detail = out.detail;
            tree_.node(node_id).status = NodeStatus::Failed;
        }

        if (is_goal_reached(world_.robot, sc_.goal, cfg_.goal_tolerance,
                            sc_.constraints.max_climb_height)) {
            terminate_success();
            return;
        }
        if (t_before < budget() - 1e-9 && t_ >= budget() - 1e-9)
            res_.evidence.budget_crossed_mid_skill = true;

        // Mid-skill sightings merge with the post-skill sweep; the first
        // mention wins so a New is not downgraded by a later Updated.
        ObservationDelta post = out.success() ? sense() : survey();
        std::vector<ObservationDelta::Entry> deltas = std::move(pending);
        deltas.insert(deltas.end(), post.entries.begin(), post.entries.end());
        std::set<std::string> seen;
        std::vector<ObservationDelta::Entry> unique;
        for (auto& e : deltas)
            if (seen.insert(e.id).second) unique.push_back(e);
        trace_observe(unique);

        if (!replan_enabled()) {
            // Fixed-plan ablation: a failed step is skipped, nothing replans.
            if (!out.success()) ++idx_;
            return;
        }

        if (!out.success()) {
            AdviceEvent fe;
            fe.kind = AdviceEvent::Kind::Failure;
            fe.node_id = node_id;
            fe.object_id = step.object_id;
            fe.detail = out.detail.empty() ? cause_name(out.failure_cause)
                                           : out.detail;
            Interpretation interp = advise(fe);
            ++res_.replans;
            res_.replan_events.push_back({t_, interp});
            revise_failure(node_id, interp);
            if (done_) return;
        }

        if (!delta_advice()) return;
        for (const auto& e : unique) {
            if (done_ || t_ >= budget() - 1e-9) return;
            AdviceEvent ev;
            ev.kind = e.flag == ObservationDelta::Flag::New
                          ? AdviceEvent::Kind::NewObject
                          : AdviceEvent::Kind::Revaluation;
            ev.object_id = e.id;
            ev.detail = describe_delta(e);
            Interpretation interp = advise(ev);
            if (!interp.replan) continue;
            ++res_.replans;
            res_.replan_events.push_back({t_, interp});
            revise_delta(interp);
            if (done_) return;
        }
    }

    Interpretation advise(const AdviceEvent& ev) {
        Interpretation interp;
        try {
            interp = charged(
                1, [&] { return backend_.advise(ctx(), tree_, anchor_, ev); });
        } catch (const RemoteError& e) {
            if (e.kind != RemoteError::Kind::Parse) throw;
            interp.kind = ev.kind;
            interp.node_id = ev.node_id;
            interp.object_id = ev.object_id;
            interp.detail = ev.detail;
            interp.replan = ev.kind == AdviceEvent::Kind::Failure;
        }
        const char* kind = ev.kind == AdviceEvent::Kind::Failure ? "failure"
                           : ev.kind == AdviceEvent::Kind::NewObject
                               ? "new_object"
                               : "revaluation";
        trace("advise", Json{{"advice", kind},
                             {"object", ev.object_id},
                             {"node", ev.node_id},
                             {"replan", interp.replan},
                             {"detail", ev.detail}});
        return interp;
    }

    void accumulate_trajectory(const SkillOutcome& out) {
        Pose3 prev = last_pose_;
        for (const auto& [tt, p] : out.trajectory) {
            res_.trajectory_length += distance_xy(prev, p);
            prev = p;
        }
        res_.trajectory_length += distance_xy(prev, world_.robot);
        last_pose_ = world_.robot;
    }

    // --- termination --------------------------------------------------------
    void terminate_success() {
        done_ = true;
        res_.success = true;
        res_.termination_reason = "goal reached";
        trace("terminate",
              Json{{"success", true}, {"reason", res_.termination_reason}});
    }

    void terminate_failure(const std::string& reason) {
        done_ = true;
        res_.success = false;
        res_.termination_reason = reason;
        auto& ev = res_.evidence;
        ev.budget_exceeded = t_ >= budget() - 1e-9;
        ev.replans = res_.replans;
        ev.known_objects = static_cast<int>(belief_.known.size());
        ev.world_objects = static_cast<int>(sc_.objects.size());
        res_.failure = classify_failure(ev);
        trace("terminate", Json{{"success", false},
                                {"reason", reason},
                                {"failure_class", to_string(*res_.failure)}});
    }

    void terminate_error(const std::string& reason) {
        done_ = true;
        res_.success = false;
        res_.termination_reason = reason;
        trace("terminate", Json{{"success", false}, {"reason", reason}});
    }

    void skeleton_end() {
        if (!replan_enabled()) {
            res_.evidence.plan_exhausted = true;
            terminate_failure("plan completed without reaching the goal");
            return;
        }
        if (reproposals_ >= kMaxReproposals) {
            // Reproposing has looped without progress; fall through to
            // scouting (or final exhaustion).
            exhausted();
            return;
        }
        ++reproposals_;
        trace("revise",
              Json{{"action", "repropose"}, {"round", reproposals_}});
        if (!extend_with_fresh_proposals()) exhausted();
    }

    void run_inner() {
        trace_observe(sense().entries);  // sensing precedes the first proposal
        if (!plan_fresh()) exhausted();
        while (!done_) {
            if (t_ >= budget() - 1e-9) {
                terminate_failure("time budget exceeded");
                break;
            }
            if (idx_ >= skeleton_.size()) {
                skeleton_end();
                continue;
            }
            execute_node(skeleton_[idx_]);
        }
    }

    static constexpr int kMaxReproposals = 8;

    const Scenario& sc_;
    PlanningBackend& backend_;
    const EpisodeConfig& cfg_;
    WorldState world_;
    BeliefState belief_;
    Rng rng_;
    PlanTree tree_;
    Pose3 last_pose_;
    bool modeled_;

    int anchor_ = PlanTree::kRoot;
    std::vector<int> skeleton_;
    std::size_t idx_ = 0;
    double t_ = 0.0;
    int scouts_used_ = 0;
    int reproposals_ = 0;
    bool done_ = false;
    EpisodeResult res_;
};

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, PlanningBackend& backend,
                          const EpisodeConfig& cfg) {
    return Runner(scenario, backend, cfg).run();
}

}  // namespace ainav
