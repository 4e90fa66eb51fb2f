#include "ainav/plan_tree.hpp"

#include <algorithm>

#include <json.hpp>

namespace ainav {

using nlohmann::json;

std::string to_string(SkillKind k) {
    switch (k) {
        case SkillKind::Walk: return "walk";
        case SkillKind::Climb: return "climb";
        case SkillKind::Navigate: return "navigate";
        case SkillKind::Push: return "push";
    }
    return "walk";
}

std::string to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::Proposed: return "proposed";
        case NodeStatus::Selected: return "selected";
        case NodeStatus::Executed: return "executed";
        case NodeStatus::Failed: return "failed";
        case NodeStatus::Pruned: return "pruned";
    }
    return "proposed";
}

PlanTree::PlanTree(double gamma) : gamma_(gamma) {
    if (gamma < 0.0 || gamma > 1.0)
        throw TreeError("gamma must lie in [0, 1]");
    PlanNode root;
    root.id = 0;
    root.parent = -1;
    nodes_.push_back(root);
}

const PlanNode& PlanTree::node(int id) const {
    if (!has_node(id)) throw TreeError("unknown node id");
    return nodes_[id];
}

PlanNode& PlanTree::node(int id) {
    if (!has_node(id)) throw TreeError("unknown node id");
    return nodes_[id];
}

bool PlanTree::has_node(int id) const {
    return id >= 0 && id < static_cast<int>(nodes_.size());
}

int PlanTree::new_node(int parent, const PlanStep& step) {
    PlanNode n;
    n.id = static_cast<int>(nodes_.size());
    n.parent = parent;
    n.step = step;
    nodes_.push_back(n);
    nodes_[parent].children.push_back(n.id);
    return n.id;
}

PlanTree PlanTree::build(const std::vector<SkillLevelPlan>& plans,
                         double gamma) {
    PlanTree t(gamma);
    t.add_subtree(kRoot, plans);
    return t;
}

std::vector<int> PlanTree::add_subtree(
    int attach_at, const std::vector<SkillLevelPlan>& suffixes) {
    if (!has_node(attach_at)) throw TreeError("unknown attach node");
    if (nodes_[attach_at].status == NodeStatus::Pruned)
        throw TreeError("cannot attach under a pruned node");
    std::vector<int> created;
    for (const auto& plan : suffixes) {
        int cur = attach_at;
        bool diverged = false;
        for (const auto& step : plan.steps) {
            int next = -1;
            if (!diverged) {
                // Steps merge only while the whole prefix has matched.
                for (int c : nodes_[cur].children) {
                    if (nodes_[c].status != NodeStatus::Pruned &&
                        nodes_[c].step == step) {
                        next = c;
                        break;
                    }
                }
            }
            if (next < 0) {
                diverged = true;
                next = new_node(cur, step);
                created.push_back(next);
            }
            cur = next;
        }
    }
    return created;
}

void PlanTree::annotate(const std::map<int, NodeScore>& scores,
                        const std::vector<int>& goal_leaves, double bonus,
                        bool require_complete) {
    for (const auto& [id, score] : scores) {
        if (!has_node(id) || id == kRoot)
            throw TreeError("annotate: unknown node id " + std::to_string(id));
        if (score.r < 0.0 || score.r > 1.0)
            throw TreeError("annotate: reward out of [0, 1] for node " +
                            std::to_string(id));
    }
    if (require_complete) {
        for (const auto& n : nodes_) {
            if (n.id == kRoot || n.status == NodeStatus::Pruned) continue;
            if (!scores.count(n.id))
                throw TreeError("annotate: missing score for node " +
                                std::to_string(n.id));
        }
    }
    for (const auto& [id, score] : scores) {
        if (nodes_[id].status == NodeStatus::Pruned) continue;
        nodes_[id].r = score.r;
        if (!score.executable) prune_node(id);
    }
    for (int id : goal_leaves) {
        if (!has_node(id) || id == kRoot)
            throw TreeError("annotate: unknown goal leaf " +
                            std::to_string(id));
        if (nodes_[id].status != NodeStatus::Pruned)
            nodes_[id].terminal_bonus = bonus;
    }
}

void PlanTree::backpropagate() {
    // Children always carry larger ids than their parent, so one reverse
    // sweep is a valid bottom-up order.
    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
        PlanNode& n = nodes_[id];
        if (n.status == NodeStatus::Pruned) continue;
        double sum = 0.0;
        int count = 0;
        for (int c : n.children) {
            if (nodes_[c].status == NodeStatus::Pruned) continue;
            sum += nodes_[c].q;
            ++count;
        }
        n.q = n.r + n.terminal_bonus +
              (count > 0 ? gamma_ * sum / count : 0.0);
    }
}

std::vector<int> PlanTree::select_skeleton(int from) {
    if (!has_node(from)) throw TreeError("unknown node id");
    for (auto& n : nodes_) {
        if (n.status == NodeStatus::Selected) n.status = NodeStatus::Proposed;
    }
    std::vector<int> path;
    int cur = from;
    while (true) {
        int best = -1;
        for (int c : nodes_[cur].children) {
            if (nodes_[c].status == NodeStatus::Pruned) continue;
            if (best < 0 || nodes_[c].q > nodes_[best].q) best = c;
            // Ties keep the smaller id, which is the one seen first.
        }
        if (best < 0) break;
        path.push_back(best);
        cur = best;
    }
    if (path.empty()) throw TreeError("no viable plan");
    for (int id : path) {
        if (nodes_[id].status == NodeStatus::Proposed)
            nodes_[id].status = NodeStatus::Selected;
    }
    return path;
}

void PlanTree::prune_node(int id) {
    if (!has_node(id)) throw TreeError("unknown node id");
    if (id == kRoot) throw TreeError("cannot prune the root");
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        nodes_[cur].status = NodeStatus::Pruned;
        for (int c : nodes_[cur].children) stack.push_back(c);
    }
}

std::string PlanTree::to_json_text() const {
    json j;
    j["gamma"] = gamma_;
    j["nodes"] = json::array();
    for (const auto& n : nodes_) {
        j["nodes"].push_back({{"id", n.id},
                              {"parent", n.parent},
                              {"skill", to_string(n.step.skill)},
                              {"symbolic_param", n.step.symbolic_param},
                              {"object_id", n.step.object_id},
                              {"r", n.r},
                              {"terminal_bonus", n.terminal_bonus},
                              {"q", n.q},
                              {"status", to_string(n.status)},
                              {"children", n.children}});
    }
    return j.dump(2);
}

namespace {

SkillKind skill_from_string(const std::string& s) {
    if (s == "walk") return SkillKind::Walk;
    if (s == "climb") return SkillKind::Climb;
    if (s == "navigate") return SkillKind::Navigate;
    if (s == "push") return SkillKind::Push;
    throw TreeError("unknown skill: " + s);
}

NodeStatus status_from_string(const std::string& s) {
    if (s == "proposed") return NodeStatus::Proposed;
    if (s == "selected") return NodeStatus::Selected;
    if (s == "executed") return NodeStatus::Executed;
    if (s == "failed") return NodeStatus::Failed;
    if (s == "pruned") return NodeStatus::Pruned;
    throw TreeError("unknown status: " + s);
}

}  // namespace

PlanTree PlanTree::from_json_text(const std::string& text) {
    json j = json::parse(text);
    PlanTree t(j.at("gamma").get<double>());
    t.nodes_.clear();
    for (const auto& jn : j.at("nodes")) {
        PlanNode n;
        n.id = jn.at("id").get<int>();
        n.parent = jn.at("parent").get<int>();
        n.step.skill = skill_from_string(jn.at("skill").get<std::string>());
        n.step.symbolic_param = jn.at("symbolic_param").get<std::string>();
        n.step.object_id = jn.at("object_id").get<std::string>();
        n.r = jn.at("r").get<double>();
        n.terminal_bonus = jn.at("terminal_bonus").get<double>();
        n.q = jn.at("q").get<double>();
        n.status = status_from_string(jn.at("status").get<std::string>());
        n.children = jn.at("children").get<std::vector<int>>();
        t.nodes_.push_back(std::move(n));
    }
    if (t.nodes_.empty() || t.nodes_[0].id != 0)
        throw TreeError("tree json: missing root");
    return t;
}

std::vector<std::vector<PlanStep>> PlanTree::recover_plans() const {
    std::vector<std::vector<PlanStep>> out;
    for (const auto& n : nodes_) {
        if (n.id == kRoot || n.status == NodeStatus::Pruned) continue;
        bool leaf = true;
        for (int c : n.children)
            if (nodes_[c].status != NodeStatus::Pruned) leaf = false;
        if (!leaf) continue;
        std::vector<PlanStep> plan;
        for (int cur = n.id; cur != kRoot; cur = nodes_[cur].parent)
            plan.push_back(nodes_[cur].step);
        std::reverse(plan.begin(), plan.end());
        out.push_back(std::move(plan));
    }
    return out;
}

}  // namespace ainav
