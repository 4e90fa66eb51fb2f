#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ainav/agents.hpp"

namespace ainav {

enum class Ablation { None, Single, SkillOnly, NoReplan, FailureOnly };

std::string to_string(Ablation a);
Ablation ablation_from_string(const std::string& s);

// Whether modeled planning latency advances the simulation clock.
enum class TimeAccounting { PlanningCounts, PlanningFree };

enum class FailureClass {
    SceneUnderstandingError,
    IncorrectTaskDecomposition,
    SkillExecutionUnfinished,
    IntraSkillFailure,
    SkillTransitionFailure,
};

std::string to_string(FailureClass c);

struct EpisodeConfig {
    double gamma = 0.9;
    double terminal_bonus = 1.0;
    std::uint64_t seed = 0;
    int n_plans = 5;
    Ablation ablation = Ablation::None;
    TimeAccounting accounting = TimeAccounting::PlanningCounts;
    // Modeled sim-time cost per planning call for backends without real
    // latency; remote backends use measured wall clock instead.
    double planning_cost_s = 1.0;
    double noise_k = 0.02;
    double goal_tolerance = 0.3;
    int max_scouts = 2;
    FovParams fov;
    SkillParams skills;
};

struct TraceEvent {
    double t = 0.0;
    std::string kind;  // observe|plan|select|execute|outcome|advise|revise|terminate
    std::string payload;  // JSON object text (without t/kind)
};

struct ReplanEvent {
    double t = 0.0;
    Interpretation interpretation;
};

// Inputs of the failure taxonomy, kept explicit so the mapping is testable
// without running episodes.
struct FailureEvidence {
    bool panicked = false;
    bool budget_exceeded = false;
    bool budget_crossed_mid_skill = false;
    bool plan_exhausted = false;
    int replans = 0;
    bool interaction_executed = false;  // any push or climb actually ran
    int known_objects = 0;
    int world_objects = 0;
    bool has_last_failure = false;
    SkillKind last_skill = SkillKind::Walk;
    std::optional<FailureCause> last_cause;
    double last_elapsed = 0.0;
    std::string last_detail;
};

FailureClass classify_failure(const FailureEvidence& e);

struct EpisodeResult {
    bool success = false;
    std::optional<FailureClass> failure;
    std::string termination_reason;
    double overall_time = 0.0;    // sim clock at termination
    double planning_time = 0.0;
    double execution_time = 0.0;
    double trajectory_length = 0.0;
    int replans = 0;
    int skills_executed = 0;
    std::vector<ReplanEvent> replan_events;
    FailureEvidence evidence;
    std::vector<TraceEvent> trace;

    // One JSON object per line: {"t":..,"kind":..,...}.
    std::string trace_ndjson() const;
};

// Closed-loop episode: observe, plan, execute, advise, revise until the goal
// is reached, the plan space is exhausted, or the time budget runs out.
EpisodeResult run_episode(const Scenario& scenario, PlanningBackend& backend,
                          const EpisodeConfig& cfg = {});

}  // namespace ainav
