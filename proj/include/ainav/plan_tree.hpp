#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ainav {

enum class SkillKind { Walk, Climb, Navigate, Push };

std::string to_string(SkillKind k);

// One plan step. symbolic_param is the abstract target ("goal",
// "top of box_1", ...); object_id names the manipulated object for Push and
// is empty otherwise.
struct PlanStep {
    SkillKind skill = SkillKind::Walk;
    std::string symbolic_param;
    std::string object_id;

    bool operator==(const PlanStep&) const = default;
};

struct SkillLevelPlan {
    std::vector<PlanStep> steps;
};

enum class NodeStatus { Proposed, Selected, Executed, Failed, Pruned };

std::string to_string(NodeStatus s);

struct PlanNode {
    int id = 0;
    int parent = -1;
    PlanStep step;                 // unused for the synthetic root
    double r = 0.0;
    double terminal_bonus = 0.0;
    double q = 0.0;
    NodeStatus status = NodeStatus::Proposed;
    std::vector<int> children;
};

struct TreeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NodeScore {
    double r = 0.0;
    bool executable = true;
};

// Plan tree with a synthetic root (id 0). Plans sharing a textual step
// prefix share nodes; node ids are assigned in insertion order.
class PlanTree {
  public:
    explicit PlanTree(double gamma = 0.9);

    double gamma() const { return gamma_; }
    const PlanNode& node(int id) const;
    PlanNode& node(int id);
    bool has_node(int id) const;
    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<PlanNode>& nodes() const { return nodes_; }
    static constexpr int kRoot = 0;

    // Merges plans under the root; empty plans are skipped.
    static PlanTree build(const std::vector<SkillLevelPlan>& plans,
                          double gamma = 0.9);

    // Grafts suffix plans under attach_at with prefix merging among existing
    // children. Returns ids of newly created nodes. Throws TreeError when
    // attach_at is unknown or pruned.
    std::vector<int> add_subtree(int attach_at,
                                 const std::vector<SkillLevelPlan>& suffixes);

    // Applies scores: r and executability for every non-root node in
    // `scores`; executable == false prunes the node's subtree. Nodes in
    // goal_leaves get `bonus` as terminal bonus. If `require_complete`,
    // every non-root non-pruned node must be covered.
    void annotate(const std::map<int, NodeScore>& scores,
                  const std::vector<int>& goal_leaves, double bonus = 1.0,
                  bool require_complete = true);

    // Eq. 1 bottom-up pass: Q(n) = r(n) + bonus(n) + gamma * mean of
    // non-pruned children's Q. Pruned children are excluded from both the
    // sum and the count.
    void backpropagate();

    // Greedy descent by Q from `from` (default root) to a leaf; ties break
    // toward the smallest node id. Marks the path Selected (demoting any
    // previously Selected nodes back to Proposed) and returns it, excluding
    // the root. Throws TreeError("no viable plan") when every child of
    // `from` is pruned.
    std::vector<int> select_skeleton(int from = kRoot);

    // Marks the node and its subtree Pruned. Idempotent. Root cannot be
    // pruned.
    void prune_node(int id);

    std::string to_json_text() const;
    static PlanTree from_json_text(const std::string& text);

    // Root-to-leaf step sequences of non-pruned leaves (plan recovery).
    std::vector<std::vector<PlanStep>> recover_plans() const;

  private:
    int new_node(int parent, const PlanStep& step);
    double gamma_;
    std::vector<PlanNode> nodes_;
};

}  // namespace ainav
