#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ainav {

enum class Role {
    ObjectProposer,
    SkillProposer,
    Evaluator,
    ParamCalc,
    Advisor,
    Arborist,
};

std::string to_string(Role r);

struct PromptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raw template text for a role. Slots appear as bracketed names, e.g.
// "[goal point]"; bracketed literals that are part of the answer templates
// ("[begin of plan]", "[objects]", "[x, y, z]") are not slots.
const std::string& prompt_template(Role r);

// Slot names required by a role, in template order.
const std::vector<std::string>& prompt_slots(Role r);

// Fills every declared slot of the role. Throws PromptError when a required
// slot value is missing. Rendering is deterministic: equal inputs yield
// byte-identical output.
std::string render_prompt(Role r,
                          const std::map<std::string, std::string>& slots);

// Answer-template markers (used by the parsers and golden tests).
inline constexpr const char* kBeginPlanMarker = "[begin of plan]";
inline constexpr const char* kEndPlanMarker = "[end of plan]";
inline constexpr const char* kBeginEvalMarker = "[begin of evaluation]";
inline constexpr const char* kEndEvalMarker = "[end of evaluation]";

}  // namespace ainav
