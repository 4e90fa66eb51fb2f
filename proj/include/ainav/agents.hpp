#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ainav/parsers.hpp"
#include "ainav/plan_tree.hpp"
#include "ainav/prompts.hpp"
#include "ainav/skills.hpp"
#include "ainav/world.hpp"

namespace ainav {

// Everything a planning role sees: structured state for the rule backend,
// templated text for the remote one.
struct AgentContext {
    Pose3 goal;
    ConstraintSet constraints;
    Bounds bounds;
    BeliefState belief;  // snapshot the round plans against
    SkillParams skill_params;
    std::vector<std::string> skill_library;
    std::string scene_summary;
    std::string object_descriptions;  // one line per known object, id order

    static AgentContext from_belief(const BeliefState& belief,
                                    const Bounds& bounds,
                                    const ConstraintSet& cs,
                                    const SkillParams& params = {});
};

struct ObjectLevelPlan {
    int plan_id = 0;
    std::vector<std::string> objects_used;
    std::string narrative;  // "First, ... Second, ..."
};

struct AdviceEvent {
    enum class Kind { Failure, NewObject, Revaluation };
    Kind kind = Kind::Failure;
    int node_id = -1;        // failed node (Failure)
    std::string object_id;   // NewObject / Revaluation subject
    std::string detail;      // outcome detail or delta description
};

struct Interpretation {
    AdviceEvent::Kind kind = AdviceEvent::Kind::Failure;
    int node_id = -1;
    std::string object_id;
    std::string detail;
    bool replan = false;
    std::string suggestions;  // never empty when replan is true
};

struct ResolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyProposal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The symbolic parameter's object reference, if any ("top of box_1" ->
// "box_1"; "goal" -> nullopt).
std::optional<std::string> symbolic_object_id(const std::string& param);

class PlanningBackend {
  public:
    virtual ~PlanningBackend() = default;
    virtual std::string name() const = 0;

    virtual std::vector<ObjectLevelPlan> propose_object_level(
        const AgentContext& ctx, int n_plans) = 0;
    virtual std::vector<SkillLevelPlan> propose_skill_level(
        const AgentContext& ctx, const std::vector<ObjectLevelPlan>& object_plans,
        int n_plans) = 0;
    // Scores for the non-pruned nodes strictly below `anchor`.
    virtual std::map<int, NodeScore> evaluate_tree(const AgentContext& ctx,
                                                   const PlanTree& tree,
                                                   int anchor) = 0;
    virtual Pose3 resolve(const AgentContext& ctx, const PlanStep& step) = 0;
    virtual Interpretation advise(const AgentContext& ctx,
                                  const PlanTree& tree, int anchor,
                                  const AdviceEvent& event) = 0;
    // Suffix plans the arborist wants added under `anchor`; pruning stays
    // local to the caller.
    virtual std::vector<SkillLevelPlan> arborist_additions(
        const AgentContext& ctx, const PlanTree& tree, int anchor,
        const Interpretation& interp) = 0;
};

// Deterministic geometric strategies; a pure function of (ctx, seed-free
// state). Difficulty constants: walk 0.1, navigate 0.2, climb 0.5, push 0.6.
class RuleBasedBackend : public PlanningBackend {
  public:
    std::string name() const override { return "rule"; }
    std::vector<ObjectLevelPlan> propose_object_level(const AgentContext& ctx,
                                                      int n_plans) override;
    std::vector<SkillLevelPlan> propose_skill_level(
        const AgentContext& ctx, const std::vector<ObjectLevelPlan>& object_plans,
        int n_plans) override;
    std::map<int, NodeScore> evaluate_tree(const AgentContext& ctx,
                                           const PlanTree& tree,
                                           int anchor) override;
    Pose3 resolve(const AgentContext& ctx, const PlanStep& step) override;
    Interpretation advise(const AgentContext& ctx, const PlanTree& tree,
                          int anchor, const AdviceEvent& event) override;
    std::vector<SkillLevelPlan> arborist_additions(
        const AgentContext& ctx, const PlanTree& tree, int anchor,
        const Interpretation& interp) override;

    // Value margin a new-object plan must clear to trigger a replan.
    double replan_margin = 0.1;
};

double skill_difficulty(SkillKind k);

// Two-stage proposal glue: object level then skill level, then drops plans
// referencing unknown object ids. Throws EmptyProposal when nothing
// survives.
std::vector<SkillLevelPlan> propose(PlanningBackend& backend,
                                    const AgentContext& ctx, int n_plans = 5,
                                    bool skip_object_stage = false);

// Rule-side simulation used by both backends to find which leaves reach the
// goal (feeds the terminal bonus of Eq. 1).
std::vector<int> compute_goal_leaves(const AgentContext& ctx,
                                     const PlanTree& tree, int anchor);

// Geometric grounding of a symbolic parameter against an explicit belief.
// Vocabulary: "goal", "top of <id>", "front|behind|left|right of <id>",
// "push target for <id>", "stair slot against <id>", "frontier toward goal".
// Throws ResolveError on unknown ids or phrases.
Pose3 resolve_symbolic(const AgentContext& ctx, const BeliefState& belief,
                       const PlanStep& step);

// Simulates `step` on a belief copy: teleports the robot / moves the pushed
// box. Returns false when the step is infeasible under skill_feasible.
bool simulate_step(const AgentContext& ctx, BeliefState& belief,
                   const PlanStep& step);

// Node-id paths from `anchor` (exclusive) down to each non-pruned leaf.
std::vector<std::vector<int>> anchor_leaf_paths(const PlanTree& tree,
                                                int anchor);

}  // namespace ainav
