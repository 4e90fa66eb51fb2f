#include "ainav/prompts.hpp"

namespace ainav {

std::string to_string(Role r) {
    switch (r) {
        case Role::ObjectProposer: return "object_proposer";
        case Role::SkillProposer: return "skill_proposer";
        case Role::Evaluator: return "evaluator";
        case Role::ParamCalc: return "param_calc";
        case Role::Advisor: return "advisor";
        case Role::Arborist: return "arborist";
    }
    return "object_proposer";
}

namespace {

const std::string kObjectProposerTemplate = R"(You are a quadruped robot on the ground in a 3D world. Your goal is to navigate to a specific point in the 3D space. Your navigation goal is [goal point], and your current scene understanding is [scene understanding].
There are several objects in the scene that you may utilize. We use two parameters, position and size, to represent the location and size of an object, respectively. Each object's position is represented by a 3D vector [x, y, z]. Each object's size is represented as a 3D vector [length, width, height]. [object description].
You have a skill library containing the following skills and corresponding parameters: [skill library].
You must follow these constraints: [constraints].
Give me five different abstract plans for using objects to help you complete navigation tasks. The plan must include which objects you need to use, the sequence you use the objects, how to use the objects. You must analyze the problem step by step and show the thinking process.
You must follow the following answer template:

[begin of plan]

Plan1: I need to use [objects]. First, ... Second ...

Plan2: ...

[end of plan]
)";

const std::string kSkillProposerTemplate = R"(You are a quadruped robot on the ground. Your goal is to navigate to a specific point in the 3D space. Your navigation goal is [goal point].
You have a skill library containing the following skills and corresponding parameters: [skill library].
Here are some abstract plans: [object-level plans], you need to generate detailed plans according to each abstract plan. Each step in the detailed plan consists of a skill with an abstract position like 'walk-to('abstract position')'.

You must follow the following answer template:

[begin of plan]

Plan1: [

('step1','<skill>'),

...

],

[end of plan]
)";

const std::string kEvaluatorTemplate = R"(You are a quadruped robot on the ground in a 3D world. Your goal is to navigate to a specific point in the 3D space. Your navigation goal is [goal point], and your current scene understanding is [scene understanding]
There are several objects in the scene that you may utilize: [object description].
You have a skill library containing the following skills and corresponding parameters: [skill library].
Here are some detailed plans to accomplish the navigation task: [candidate plans]
You need to evaluate the reward of each step in the plan based on its contribution to task completion, assigning a value between 0 and 1. Specifically, this involves simulating whether future steps can reach the goal under the current step to assess its impact. If the step does not satisfy the given constraints, the reward is 0.
Constraints you must follow: [constraints].
At the end of your response, reply to me with the following answer template:

[begin of evaluation]

Plan1: [

('step1', '<skill>', 'reward: ...'),

...

],

[end of evaluation]
)";

const std::string kParamCalcTemplate = R"(The current plan is [current plan], you need to calculate the 3D coordinates [x, y, z] of the abstract position in the plan based on the robot pose and the updated object information.
The robot pose is [robot pose].
The object information is [object description].
You need to consider the spatial relationship between objects to obtain a reasonable position.
You must calculate the position along each dimension step by step.
)";

const std::string kAdvisorTemplate = R"(You are a quadruped robot on the ground in a 3D world. Your goal is to navigate to a specific point in the 3D space. Your navigation goal is [goal point]. There are several objects in the scene that you may utilize: [object description].
Your current plan is: [current plan]
Now, you have a new observation interpretation of the environment: [new observation]
You need to determine whether to replan to modify your current plan based on the current plan, this new environmental observation, and the following criteria. You must analyze whether to reply, provide me with the reason, and respond with "Yes" or "No".

Replanning criteria:

* If the new observation is an execution failure of the current plan, then replanning is necessary.

* If the new observation is a new object, you need to evaluate how this new object might help complete your task. If using it results in a more effective plan than your current one, you need to replan.

* If the new observation is a revaluation of a previously known object, you need to determine whether this new information impacts your current plan. For example, if your plan requires climbing onto a box, but new observations show that the box is too high to climb, you need to replan.
)";

const std::string kArboristTemplate = R"(You are a quadruped robot on the ground in a 3D world. Your goal is to navigate to a specific point in the 3D space. Your navigation goal is [goal point]. There are several objects in the scene that you may utilize: [object description]. Constraints you must follow: [constraints]. Your current plan is: [current plan] Now, you have a new observation of the environment: [new observation] Here are replanning suggestions by the advisor: [advisor suggestions]
You must make adjustments to your current plans based on the suggestions provided by the advisor, such as expanding new skills for new objects or pruning infeasible skills.
)";

const std::vector<std::string> kObjectProposerSlots = {
    "goal point", "scene understanding", "object description",
    "skill library", "constraints"};
const std::vector<std::string> kSkillProposerSlots = {
    "goal point", "skill library", "object-level plans"};
const std::vector<std::string> kEvaluatorSlots = {
    "goal point", "scene understanding", "object description",
    "skill library", "candidate plans", "constraints"};
const std::vector<std::string> kParamCalcSlots = {
    "current plan", "robot pose", "object description"};
const std::vector<std::string> kAdvisorSlots = {
    "goal point", "object description", "current plan", "new observation"};
const std::vector<std::string> kArboristSlots = {
    "goal point", "object description", "constraints", "current plan",
    "new observation", "advisor suggestions"};

std::string replace_all(std::string text, const std::string& needle,
                        const std::string& value) {
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace

const std::string& prompt_template(Role r) {
    switch (r) {
        case Role::ObjectProposer: return kObjectProposerTemplate;
        case Role::SkillProposer: return kSkillProposerTemplate;
        case Role::Evaluator: return kEvaluatorTemplate;
        case Role::ParamCalc: return kParamCalcTemplate;
        case Role::Advisor: return kAdvisorTemplate;
        case Role::Arborist: return kArboristTemplate;
    }
    return kObjectProposerTemplate;
}

const std::vector<std::string>& prompt_slots(Role r) {
    switch (r) {
        case Role::ObjectProposer: return kObjectProposerSlots;
        case Role::SkillProposer: return kSkillProposerSlots;
        case Role::Evaluator: return kEvaluatorSlots;
        case Role::ParamCalc: return kParamCalcSlots;
        case Role::Advisor: return kAdvisorSlots;
        case Role::Arborist: return kArboristSlots;
    }
    return kObjectProposerSlots;
}

std::string render_prompt(Role r,
                          const std::map<std::string, std::string>& slots) {
    std::string text = prompt_template(r);
    for (const auto& name : prompt_slots(r)) {
        auto it = slots.find(name);
        if (it == slots.end())
            throw PromptError("missing slot value: [" + name + "] for role " +
                              to_string(r));
        text = replace_all(text, "[" + name + "]", it->second);
    }
    return text;
}

}  // namespace ainav
