#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ainav/plan_tree.hpp"

namespace ainav {

class ParseError : public std::runtime_error {
  public:
    enum class Kind {
        MissingMarker,
        MalformedStep,
        UnknownSkill,
        NonNumericReward,
        Empty,
    };

    ParseError(Kind kind, const std::string& message, int plan_index = -1,
               int step_index = -1)
        : std::runtime_error(message),
          kind(kind),
          plan_index(plan_index),
          step_index(step_index) {}

    Kind kind;
    int plan_index;   // 1-based plan number, -1 when not applicable
    int step_index;   // 1-based step number, -1 when not applicable
};

// Renders one step as its skill call, e.g. "navigate-to('goal')" or
// "push-to('box_1', 'push target for box_1')".
std::string format_skill_call(const PlanStep& step);

// Parses a single skill call back into a step.
PlanStep parse_skill_call(const std::string& text, int plan_index = -1,
                          int step_index = -1);

// Serializes plans into the skill-level answer template
// ([begin of plan] ... [end of plan]).
std::string plans_to_answer_text(const std::vector<SkillLevelPlan>& plans);

// Extracts plans from an answer between the plan markers. Throws ParseError:
// MissingMarker when the block is absent, MalformedStep / UnknownSkill with
// plan and step indices, Empty when the block holds no plans.
std::vector<SkillLevelPlan> parse_skill_plans(const std::string& text);

struct EvaluationEntry {
    PlanStep step;
    double r = 0.0;
    bool executable = true;
};

struct ParsedEvaluation {
    // Keyed by (plan number, step number), both 1-based.
    std::map<std::pair<int, int>, EvaluationEntry> entries;
    std::vector<std::string> warnings;  // e.g. out-of-range rewards clamped
};

// Serializes per-plan step rewards into the evaluator answer template.
std::string evaluation_to_answer_text(
    const std::vector<SkillLevelPlan>& plans,
    const std::vector<std::vector<double>>& rewards);

// Parses the evaluator answer. Rewards are clamped into [0, 1] with a
// warning; a reward of exactly 0 marks the step non-executable.
ParsedEvaluation parse_evaluation(const std::string& text);

// Advisor replies: first standalone "Yes"/"No" token decides; the full text
// is the reason. Throws ParseError{Empty} when neither appears.
bool parse_yes_no(const std::string& text);

}  // namespace ainav
