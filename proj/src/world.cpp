#include "ainav/world.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ainav {

using nlohmann::json;

std::string to_string(ObjectKind k) {
    switch (k) {
        case ObjectKind::Box: return "box";
        case ObjectKind::Hurdle: return "hurdle";
        case ObjectKind::Wall: return "wall";
        case ObjectKind::Platform: return "platform";
    }
    return "box";
}

std::string to_string(PushClass c) {
    return c == PushClass::Heavy ? "heavy" : "light";
}

ObjectKind object_kind_from_string(const std::string& s) {
    if (s == "box") return ObjectKind::Box;
    if (s == "hurdle") return ObjectKind::Hurdle;
    if (s == "wall") return ObjectKind::Wall;
    if (s == "platform") return ObjectKind::Platform;
    throw ScenarioError("unknown object kind: " + s);
}

PushClass push_class_from_string(const std::string& s) {
    if (s == "light") return PushClass::Light;
    if (s == "heavy") return PushClass::Heavy;
    throw ScenarioError("unknown push_class: " + s);
}

const SceneObject* Scenario::find(const std::string& id) const {
    for (const auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

SceneObject* WorldState::find(const std::string& id) {
    for (auto& o : scenario.objects)
        if (o.id == id) return &o;
    return nullptr;
}

const SceneObject* WorldState::find(const std::string& id) const {
    return scenario.find(id);
}

namespace {

Pose3 pose_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 4)
        throw ScenarioError(field + ": expected [x, y, z, yaw]");
    Pose3 p{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
            j[3].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.yaw))
        throw ScenarioError(field + ": non-finite component");
    p.yaw = wrap_angle(p.yaw);
    return p;
}

json pose_to_json(const Pose3& p) {
    return json::array({p.x, p.y, p.z, p.yaw});
}

}  // namespace

void validate_scenario(const Scenario& s) {
    if (s.scenario_id.empty()) throw ScenarioError("scenario_id: empty");
    if (!(s.bounds.max_x > s.bounds.min_x && s.bounds.max_y > s.bounds.min_y))
        throw ScenarioError("bounds: degenerate rectangle");
    if (!(s.constraints.max_climb_height > 0.0))
        throw ScenarioError("constraints.max_climb_height: must be positive");
    if (!(s.constraints.sim_time_budget > 0.0))
        throw ScenarioError("constraints.sim_time_budget: must be positive");
    if (!s.bounds.contains(s.robot_start.x, s.robot_start.y))
        throw ScenarioError("robot_start: outside bounds");
    if (!s.bounds.contains(s.goal.x, s.goal.y))
        throw ScenarioError("goal: outside bounds");
    std::set<std::string> ids;
    for (const auto& o : s.objects) {
        if (o.id.empty()) throw ScenarioError("objects: empty id");
        if (!ids.insert(o.id).second)
            throw ScenarioError("objects: duplicate id " + o.id);
        if (!(o.size.l > 0.0 && o.size.w > 0.0 && o.size.h > 0.0))
            throw ScenarioError("objects." + o.id +
                                ".size: components must be strictly positive");
        if (o.kind != ObjectKind::Box && o.movable)
            throw ScenarioError("objects." + o.id +
                                ": only boxes may be movable");
        for (const auto& c : o.footprint().corners()) {
            if (!s.bounds.contains(c[0], c[1]))
                throw ScenarioError("objects." + o.id +
                                    ": footprint outside bounds");
        }
    }
}

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("json parse error: ") + e.what());
    }
    Scenario s;
    try {
        s.scenario_id = j.at("scenario_id").get<std::string>();
        const auto& b = j.at("bounds");
        s.bounds = Bounds{b.at("min").at(0).get<double>(),
                          b.at("min").at(1).get<double>(),
                          b.at("max").at(0).get<double>(),
                          b.at("max").at(1).get<double>()};
        s.robot_start = pose_from_json(j.at("robot_start"), "robot_start");
        s.goal = pose_from_json(j.at("goal"), "goal");
        const auto& c = j.at("constraints");
        s.constraints.max_climb_height =
            c.at("max_climb_height").get<double>();
        s.constraints.sim_time_budget = c.at("sim_time_budget").get<double>();
        for (const auto& jo : j.at("objects")) {
            SceneObject o;
            o.id = jo.at("id").get<std::string>();
            o.kind = object_kind_from_string(jo.at("kind").get<std::string>());
            o.pose = pose_from_json(jo.at("pose"), "objects." + o.id + ".pose");
            const auto& sz = jo.at("size");
            if (!sz.is_array() || sz.size() != 3)
                throw ScenarioError("objects." + o.id +
                                    ".size: expected [l, w, h]");
            o.size = ObjectSize{sz[0].get<double>(), sz[1].get<double>(),
                                sz[2].get<double>()};
            o.movable = jo.at("movable").get<bool>();
            o.push_class =
                push_class_from_string(jo.at("push_class").get<std::string>());
            s.objects.push_back(std::move(o));
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario field error: ") + e.what());
    }
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str());
}

std::string scenario_to_json_text(const Scenario& s) {
    json j;
    j["scenario_id"] = s.scenario_id;
    j["bounds"] = {{"min", {s.bounds.min_x, s.bounds.min_y}},
                   {"max", {s.bounds.max_x, s.bounds.max_y}}};
    j["robot_start"] = pose_to_json(s.robot_start);
    j["goal"] = pose_to_json(s.goal);
    j["constraints"] = {{"max_climb_height", s.constraints.max_climb_height},
                        {"sim_time_budget", s.constraints.sim_time_budget}};
    j["objects"] = json::array();
    for (const auto& o : s.objects) {
        j["objects"].push_back(
            {{"id", o.id},
             {"kind", to_string(o.kind)},
             {"pose", pose_to_json(o.pose)},
             {"size", {o.size.l, o.size.w, o.size.h}},
             {"movable", o.movable},
             {"push_class", to_string(o.push_class)}});
    }
    return j.dump(2);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file: " + path);
    out << scenario_to_json_text(s) << "\n";
}

std::vector<std::string> BeliefState::known_ids() const {
    std::vector<std::string> ids;
    ids.reserve(known.size());
    for (const auto& [id, _] : known) ids.push_back(id);
    return ids;
}

const BeliefEntry* BeliefState::find(const std::string& id) const {
    auto it = known.find(id);
    return it == known.end() ? nullptr : &it->second;
}

BeliefEntry* BeliefState::find(const std::string& id) {
    auto it = known.find(id);
    return it == known.end() ? nullptr : &it->second;
}

BeliefState make_initial_belief(const Scenario& s) {
    BeliefState b;
    b.robot_pose = s.robot_start;
    b.goal = s.goal;
    return b;
}

std::vector<std::string> ObservationDelta::ids(Flag f) const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.flag == f) out.push_back(e.id);
    return out;
}

namespace {

// Walls and hurdles occlude; boxes and platforms are too low to block sight.
bool occluded(const WorldState& w, const Pose3& eye, const SceneObject& obj) {
    for (const auto& other : w.scenario.objects) {
        if (other.id == obj.id) continue;
        if (other.kind != ObjectKind::Wall && other.kind != ObjectKind::Hurdle)
            continue;
        if (segment_hits_footprint(other.footprint(), eye.x, eye.y, obj.pose.x,
                                   obj.pose.y))
            return true;
    }
    return false;
}

}  // namespace

ObservationDelta observe(const WorldState& world, BeliefState& belief,
                         const FovParams& fov, Rng& rng, double now,
                         double noise_k) {
    // Candidates in ascending id order so the noise stream is reproducible.
    std::vector<const SceneObject*> candidates;
    for (const auto& o : world.scenario.objects) candidates.push_back(&o);
    std::sort(candidates.begin(), candidates.end(),
              [](const SceneObject* a, const SceneObject* b) {
                  return a->id < b->id;
              });

    const Pose3& eye = belief.robot_pose;
    ObservationDelta delta;
    for (const SceneObject* obj : candidates) {
        // Range and noise scale with the nearest visible point, not the
        // center: a long wall seen up close is measured well even when its
        // center is far away.
        const double d =
            std::max(0.1, obj->footprint().distance(eye.x, eye.y));
        if (d > fov.radius) continue;
        if (fov.half_angle < kPi) {
            const double bearing =
                std::atan2(obj->pose.y - eye.y, obj->pose.x - eye.x);
            if (d > 1e-9 &&
                std::abs(wrap_angle(bearing - eye.yaw)) > fov.half_angle)
                continue;
        }
        if (occluded(world, eye, *obj)) continue;

        BeliefEntry* existing = belief.find(obj->id);
        const bool is_new = existing == nullptr;
        if (!is_new && d >= existing->obs_distance) {
            // Known from closer range already; pose still tracks truth.
            existing->object.pose = obj->pose;
            existing->last_seen_time = now;
            continue;
        }
        const double sigma = noise_k * d;
        SceneObject seen = *obj;
        if (sigma > 0.0) {
            std::normal_distribution<double> n(0.0, sigma);
            seen.size.l = std::max(0.01, seen.size.l + n(rng));
            seen.size.w = std::max(0.01, seen.size.w + n(rng));
            seen.size.h = std::max(0.01, seen.size.h + n(rng));
        }
        if (is_new) {
            BeliefEntry e;
            e.object = seen;
            e.obs_distance = d;
            e.last_seen_time = now;
            belief.known.emplace(obj->id, std::move(e));
            delta.entries.push_back({obj->id, ObservationDelta::Flag::New, d});
        } else {
            auto kept_movable = existing->observed_movable;
            existing->object = seen;
            existing->obs_distance = d;
            existing->last_seen_time = now;
            existing->observed_movable = kept_movable;
            delta.entries.push_back(
                {obj->id, ObservationDelta::Flag::Updated, d});
        }
    }
    return delta;
}

bool is_goal_reached(const Pose3& robot, const Pose3& goal, double tolerance,
                     double max_climb) {
    return distance_xy(robot, goal) <= tolerance &&
           std::abs(robot.z - goal.z) <= max_climb;
}

}  // namespace ainav
