#pragma once

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ainav/geometry.hpp"

namespace ainav {

using Rng = std::mt19937_64;

enum class ObjectKind { Box, Hurdle, Wall, Platform };

enum class PushClass { Light, Heavy };

std::string to_string(ObjectKind k);
std::string to_string(PushClass c);
ObjectKind object_kind_from_string(const std::string& s);
PushClass push_class_from_string(const std::string& s);

struct ObjectSize {
    double l = 0.0;
    double w = 0.0;
    double h = 0.0;
};

struct SceneObject {
    std::string id;
    ObjectKind kind = ObjectKind::Box;
    Pose3 pose;      // base center; pose.z is the base height
    ObjectSize size;
    bool movable = false;
    PushClass push_class = PushClass::Light;

    double top() const { return pose.z + size.h; }
    Footprint footprint() const {
        return Footprint{pose.x, pose.y, size.l / 2.0, size.w / 2.0, pose.yaw};
    }
};

struct ConstraintSet {
    double max_climb_height = 0.3;
    double sim_time_budget = 120.0;
};

struct Scenario {
    std::string scenario_id;
    Bounds bounds;
    Pose3 robot_start;
    Pose3 goal;
    ConstraintSet constraints;
    std::vector<SceneObject> objects;

    const SceneObject* find(const std::string& id) const;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws ScenarioError naming the offending field/invariant.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);
void validate_scenario(const Scenario& s);

// Ground-truth world: scenario with current (possibly pushed) object poses.
struct WorldState {
    Scenario scenario;
    Pose3 robot;

    explicit WorldState(Scenario s)
        : scenario(std::move(s)), robot(scenario.robot_start) {}

    SceneObject* find(const std::string& id);
    const SceneObject* find(const std::string& id) const;
};

struct BeliefEntry {
    SceneObject object;                  // size carries observation noise
    double obs_distance = 0.0;           // distance of the winning observation
    double last_seen_time = 0.0;
    std::optional<bool> observed_movable;  // set by interaction outcomes only
};

struct BeliefState {
    Pose3 robot_pose;
    Pose3 goal;
    std::map<std::string, BeliefEntry> known;  // keyed by object id

    std::vector<std::string> known_ids() const;
    const BeliefEntry* find(const std::string& id) const;
    BeliefEntry* find(const std::string& id);
};

BeliefState make_initial_belief(const Scenario& s);

struct FovParams {
    double radius = 6.0;
    double half_angle = kPi / 3.0;  // 60 degrees
};

struct ObservationDelta {
    enum class Flag { New, Updated };
    struct Entry {
        std::string id;
        Flag flag = Flag::New;
        double distance = 0.0;
    };
    std::vector<Entry> entries;

    bool empty() const { return entries.empty(); }
    std::vector<std::string> ids(Flag f) const;
};

// Senses the world from belief.robot_pose and merges the result into belief.
// Returned entries are only those that changed belief: first sightings (New)
// and closer re-observations that replaced the size sample (Updated).
// Noise: per-dimension zero-mean Gaussian on size, sigma = noise_k times the
// distance to the nearest footprint point (clamped at 0.1 m), drawn in
// ascending object-id order so a fixed seed reproduces bit-for-bit.
ObservationDelta observe(const WorldState& world, BeliefState& belief,
                         const FovParams& fov, Rng& rng, double now = 0.0,
                         double noise_k = 0.02);

bool is_goal_reached(const Pose3& robot, const Pose3& goal,
                     double tolerance = 0.3, double max_climb = 0.3);

}  // namespace ainav
