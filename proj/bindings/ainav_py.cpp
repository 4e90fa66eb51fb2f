#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ainav/agents.hpp"
#include "ainav/bench.hpp"
#include "ainav/executor.hpp"
#include "ainav/parsers.hpp"
#include "ainav/plan_tree.hpp"
#include "ainav/rewards.hpp"
#include "ainav/world.hpp"

namespace py = pybind11;
using namespace ainav;

namespace {

SkillKind skill_from_string(const std::string& s) {
    if (s == "walk") return SkillKind::Walk;
    if (s == "climb") return SkillKind::Climb;
    if (s == "navigate") return SkillKind::Navigate;
    if (s == "push") return SkillKind::Push;
    throw std::invalid_argument("unknown skill: " + s);
}

std::vector<SkillLevelPlan> to_plans(
    const std::vector<std::vector<PlanStep>>& steps) {
    std::vector<SkillLevelPlan> plans;
    for (const auto& p : steps) plans.push_back(SkillLevelPlan{p});
    return plans;
}

py::list weight_table(const std::vector<WeightEntry>& table) {
    py::list out;
    for (const auto& e : table) out.append(py::make_tuple(e.name, e.weight));
    return out;
}

}  // namespace

PYBIND11_MODULE(_ainav, m) {
    m.doc() = "Interactive navigation engine bindings";

    py::register_exception<ScenarioError>(m, "ScenarioError",
                                          PyExc_ValueError);
    py::register_exception<TreeError>(m, "TreeError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    // Reward kernels.
    m.def("phi_sq", &phi_sq, py::arg("sq_norm"));
    m.def("phi1", &phi1, py::arg("err"));
    m.def("phi2", &phi2, py::arg("ex"), py::arg("ey"));

    py::class_<JointSample>(m, "JointSample")
        .def(py::init<>())
        .def_readwrite("tau", &JointSample::tau)
        .def_readwrite("qdd", &JointSample::qdd)
        .def_readwrite("q_star", &JointSample::q_star)
        .def_readwrite("q_star_prev", &JointSample::q_star_prev);
    py::class_<BaseSample>(m, "BaseSample")
        .def(py::init<>())
        .def_readwrite("v", &BaseSample::v)
        .def_readwrite("omega", &BaseSample::omega)
        .def_readwrite("x", &BaseSample::x)
        .def_readwrite("heading", &BaseSample::heading)
        .def_readwrite("collisions", &BaseSample::collisions)
        .def_readwrite("t_air", &BaseSample::t_air);
    py::class_<CommandSample>(m, "CommandSample")
        .def(py::init<>())
        .def_readwrite("v_star", &CommandSample::v_star)
        .def_readwrite("omega_star_z", &CommandSample::omega_star_z)
        .def_readwrite("x_star", &CommandSample::x_star)
        .def_readwrite("x_obj", &CommandSample::x_obj)
        .def_readwrite("obj_heading", &CommandSample::obj_heading)
        .def_readwrite("x_obj_star", &CommandSample::x_obj_star)
        .def_readwrite("obj_heading_star", &CommandSample::obj_heading_star);
    py::class_<RewardTerm>(m, "RewardTerm")
        .def_readonly("name", &RewardTerm::name)
        .def_readonly("raw", &RewardTerm::raw)
        .def_readonly("weight", &RewardTerm::weight)
        .def("weighted", &RewardTerm::weighted);
    py::class_<RewardBreakdown>(m, "RewardBreakdown")
        .def_readonly("terms", &RewardBreakdown::terms)
        .def("total", &RewardBreakdown::total);

    const auto no_cfg = [](RewardBreakdown (*f)(const JointSample&,
                                                const BaseSample&,
                                                const CommandSample&,
                                                const RewardConfig&)) {
        return [f](const JointSample& j, const BaseSample& b,
                   const CommandSample& c) { return f(j, b, c, {}); };
    };
    m.def("walk_reward", no_cfg(&walk_reward));
    m.def("climb_reward", no_cfg(&climb_reward));
    m.def("navigation_reward", no_cfg(&navigation_reward));
    m.def("pushing_reward", no_cfg(&pushing_reward));
    m.def("walk_weight_table", [] { return weight_table(walk_weight_table()); });
    m.def("climb_weight_table",
          [] { return weight_table(climb_weight_table()); });
    m.def("navigation_weight_table",
          [] { return weight_table(navigation_weight_table()); });
    m.def("pushing_weight_table",
          [] { return weight_table(pushing_weight_table()); });

    // Plan steps and the tree.
    py::class_<PlanStep>(m, "PlanStep")
        .def(py::init([](const std::string& skill, const std::string& param,
                         const std::string& object_id) {
                 PlanStep s;
                 s.skill = skill_from_string(skill);
                 s.symbolic_param = param;
                 s.object_id = object_id;
                 return s;
             }),
             py::arg("skill"), py::arg("param"), py::arg("object_id") = "")
        .def_property_readonly(
            "skill", [](const PlanStep& s) { return to_string(s.skill); })
        .def_readonly("param", &PlanStep::symbolic_param)
        .def_readonly("object_id", &PlanStep::object_id)
        .def("__repr__",
             [](const PlanStep& s) { return format_skill_call(s); })
        .def("__eq__", [](const PlanStep& a, const PlanStep& b) {
            return a == b;
        });

    py::class_<PlanTree>(m, "PlanTree")
        .def_static(
            "build",
            [](const std::vector<std::vector<PlanStep>>& plans,
               double gamma) { return PlanTree::build(to_plans(plans), gamma); },
            py::arg("plans"), py::arg("gamma") = 0.9)
        .def_property_readonly("gamma", &PlanTree::gamma)
        .def("size", &PlanTree::size)
        .def("add_subtree",
             [](PlanTree& t, int attach_at,
                const std::vector<std::vector<PlanStep>>& suffixes) {
                 return t.add_subtree(attach_at, to_plans(suffixes));
             })
        .def("annotate",
             [](PlanTree& t,
                const std::map<int, std::pair<double, bool>>& scores,
                const std::vector<int>& goal_leaves, double bonus,
                bool require_complete) {
                 std::map<int, NodeScore> ns;
                 for (const auto& [id, se] : scores)
                     ns[id] = NodeScore{se.first, se.second};
                 t.annotate(ns, goal_leaves, bonus, require_complete);
             },
             py::arg("scores"), py::arg("goal_leaves"),
             py::arg("bonus") = 1.0, py::arg("require_complete") = true)
        .def("backpropagate", &PlanTree::backpropagate)
        .def("select_skeleton", &PlanTree::select_skeleton,
             py::arg("from_id") = PlanTree::kRoot)
        .def("prune_node", &PlanTree::prune_node)
        .def("q", [](const PlanTree& t, int id) { return t.node(id).q; })
        .def("status",
             [](const PlanTree& t, int id) {
                 return to_string(t.node(id).status);
             })
        .def("step",
             [](const PlanTree& t, int id) { return t.node(id).step; })
        .def("children",
             [](const PlanTree& t, int id) { return t.node(id).children; })
        .def("recover_plans", &PlanTree::recover_plans)
        .def("to_json", &PlanTree::to_json_text)
        .def_static("from_json", &PlanTree::from_json_text);

    // Prompt/response plumbing.
    m.def("format_skill_call", &format_skill_call);
    m.def("parse_skill_call", &parse_skill_call, py::arg("text"),
          py::arg("plan_index") = -1, py::arg("step_index") = -1);
    m.def("plans_to_answer_text",
          [](const std::vector<std::vector<PlanStep>>& plans) {
              return plans_to_answer_text(to_plans(plans));
          });
    m.def("parse_skill_plans", [](const std::string& text) {
        std::vector<std::vector<PlanStep>> out;
        for (const auto& p : parse_skill_plans(text)) out.push_back(p.steps);
        return out;
    });
    m.def("parse_yes_no", &parse_yes_no);

    // Scenarios and episodes.
    py::class_<Scenario>(m, "Scenario")
        .def_readonly("scenario_id", &Scenario::scenario_id)
        .def_property_readonly(
            "objects",
            [](const Scenario& s) {
                std::vector<std::string> ids;
                for (const auto& o : s.objects) ids.push_back(o.id);
                return ids;
            })
        .def("to_json", &scenario_to_json_text);
    m.def("generate_scenario",
          [](const std::string& task, const std::string& difficulty,
             uint64_t seed) {
              return generate_scenario(task_from_string(task),
                                       difficulty_from_string(difficulty),
                                       seed);
          },
          py::arg("task"), py::arg("difficulty"), py::arg("seed") = 0);
    m.def("scenario_from_json", &scenario_from_json_text);

    py::class_<EpisodeResult>(m, "EpisodeResult")
        .def_readonly("success", &EpisodeResult::success)
        .def_property_readonly(
            "failure_class",
            [](const EpisodeResult& r) -> py::object {
                if (!r.failure) return py::none();
                return py::str(to_string(*r.failure));
            })
        .def_readonly("termination_reason",
                      &EpisodeResult::termination_reason)
        .def_readonly("overall_time", &EpisodeResult::overall_time)
        .def_readonly("planning_time", &EpisodeResult::planning_time)
        .def_readonly("execution_time", &EpisodeResult::execution_time)
        .def_readonly("trajectory_length", &EpisodeResult::trajectory_length)
        .def_readonly("replans", &EpisodeResult::replans)
        .def_readonly("skills_executed", &EpisodeResult::skills_executed)
        .def("trace_ndjson", &EpisodeResult::trace_ndjson);
    m.def("run_episode",
          [](const Scenario& sc, double gamma, uint64_t seed,
             const std::string& ablation, int n_plans, double noise_k) {
              EpisodeConfig cfg;
              cfg.gamma = gamma;
              cfg.seed = seed;
              cfg.ablation = ablation_from_string(ablation);
              cfg.n_plans = n_plans;
              cfg.noise_k = noise_k;
              RuleBasedBackend backend;
              return run_episode(sc, backend, cfg);
          },
          py::arg("scenario"), py::arg("gamma") = 0.9, py::arg("seed") = 0,
          py::arg("ablation") = "none", py::arg("n_plans") = 5,
          py::arg("noise_k") = 0.02,
          py::call_guard<py::gil_scoped_release>());
}
