#include "ainav/parsers.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ainav/prompts.hpp"

namespace ainav {

std::string format_skill_call(const PlanStep& step) {
    switch (step.skill) {
        case SkillKind::Walk:
            return "walk-to('" + step.symbolic_param + "')";
        case SkillKind::Climb:
            return "climb-to('" + step.symbolic_param + "')";
        case SkillKind::Navigate:
            return "navigate-to('" + step.symbolic_param + "')";
        case SkillKind::Push:
            return "push-to('" + step.object_id + "', '" +
                   step.symbolic_param + "')";
    }
    return {};
}

namespace {

void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
        ++i;
}

bool expect(const std::string& s, size_t& i, char c) {
    skip_ws(s, i);
    if (i < s.size() && s[i] == c) {
        ++i;
        return true;
    }
    return false;
}

// Reads a '...'-quoted token that itself contains no quotes.
bool read_quoted(const std::string& s, size_t& i, std::string& out) {
    skip_ws(s, i);
    if (i >= s.size() || s[i] != '\'') return false;
    const size_t end = s.find('\'', i + 1);
    if (end == std::string::npos) return false;
    out = s.substr(i + 1, end - i - 1);
    i = end + 1;
    return true;
}

}  // namespace

PlanStep parse_skill_call(const std::string& text, int plan_index,
                          int step_index) {
    size_t i = 0;
    skip_ws(text, i);
    const size_t open = text.find('(', i);
    if (open == std::string::npos)
        throw ParseError(ParseError::Kind::MalformedStep,
                         "step is not a skill call: " + text, plan_index,
                         step_index);
    std::string name = text.substr(i, open - i);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(
                                name.back())))
        name.pop_back();

    SkillKind kind;
    if (name == "walk-to") kind = SkillKind::Walk;
    else if (name == "climb-to") kind = SkillKind::Climb;
    else if (name == "navigate-to") kind = SkillKind::Navigate;
    else if (name == "push-to") kind = SkillKind::Push;
    else
        throw ParseError(ParseError::Kind::UnknownSkill,
                         "unknown skill: " + name, plan_index, step_index);

    size_t p = open + 1;
    std::string first, second;
    if (!read_quoted(text, p, first))
        throw ParseError(ParseError::Kind::MalformedStep,
                         "missing skill argument: " + text, plan_index,
                         step_index);
    bool has_second = false;
    {
        size_t save = p;
        if (expect(text, p, ',')) {
            if (!read_quoted(text, p, second))
                throw ParseError(ParseError::Kind::MalformedStep,
                                 "malformed second argument: " + text,
                                 plan_index, step_index);
            has_second = true;
        } else {
            p = save;
        }
    }
    if (!expect(text, p, ')'))
        throw ParseError(ParseError::Kind::MalformedStep,
                         "unterminated skill call: " + text, plan_index,
                         step_index);

    PlanStep step;
    step.skill = kind;
    if (kind == SkillKind::Push) {
        if (!has_second)
            throw ParseError(ParseError::Kind::MalformedStep,
                             "push-to needs (object, target): " + text,
                             plan_index, step_index);
        step.object_id = first;
        step.symbolic_param = second;
    } else {
        if (has_second)
            throw ParseError(ParseError::Kind::MalformedStep,
                             "unexpected second argument: " + text,
                             plan_index, step_index);
        step.symbolic_param = first;
    }
    return step;
}

std::string plans_to_answer_text(const std::vector<SkillLevelPlan>& plans) {
    std::ostringstream out;
    out << kBeginPlanMarker << "\n";
    for (size_t p = 0; p < plans.size(); ++p) {
        out << "\nPlan" << (p + 1) << ": [\n";
        for (size_t s = 0; s < plans[p].steps.size(); ++s) {
            out << "\n('step" << (s + 1) << "','"
                << format_skill_call(plans[p].steps[s]) << "'),\n";
        }
        out << "\n],\n";
    }
    out << "\n" << kEndPlanMarker << "\n";
    return out.str();
}

namespace {

struct Block {
    int plan_number;
    std::string body;
};

// Splits the region between the markers into "PlanN:" blocks.
std::vector<Block> plan_blocks(const std::string& text, const char* begin,
                               const char* end) {
    const size_t b = text.find(begin);
    if (b == std::string::npos)
        throw ParseError(ParseError::Kind::MissingMarker,
                         std::string("missing marker: ") + begin);
    const size_t e = text.find(end, b);
    if (e == std::string::npos)
        throw ParseError(ParseError::Kind::MissingMarker,
                         std::string("missing marker: ") + end);
    const std::string region =
        text.substr(b + std::string(begin).size(),
                    e - b - std::string(begin).size());

    std::vector<Block> blocks;
    std::vector<std::pair<size_t, int>> starts;
    for (size_t i = 0; i + 4 < region.size(); ++i) {
        if (region.compare(i, 4, "Plan") != 0) continue;
        size_t j = i + 4;
        int num = 0;
        bool any = false;
        while (j < region.size() &&
               std::isdigit(static_cast<unsigned char>(region[j]))) {
            num = num * 10 + (region[j] - '0');
            ++j;
            any = true;
        }
        if (!any) continue;
        size_t k = j;
        skip_ws(region, k);
        if (k < region.size() && region[k] == ':') starts.push_back({i, num});
    }
    for (size_t n = 0; n < starts.size(); ++n) {
        const size_t from = starts[n].first;
        const size_t to =
            n + 1 < starts.size() ? starts[n + 1].first : region.size();
        blocks.push_back({starts[n].second, region.substr(from, to - from)});
    }
    return blocks;
}

// Finds step tuples "('stepN', ...)" in a plan block. Returns the 1-based
// step number and the raw remainder text (between the comma after 'stepN'
// and the closing parenthesis of the tuple).
std::vector<std::pair<int, std::string>> step_tuples(const std::string& body,
                                                     int plan_number) {
    std::vector<std::pair<int, std::string>> out;
    size_t i = 0;
    while ((i = body.find("('step", i)) != std::string::npos) {
        size_t j = i + 6;
        int num = 0;
        bool any = false;
        while (j < body.size() &&
               std::isdigit(static_cast<unsigned char>(body[j]))) {
            num = num * 10 + (body[j] - '0');
            ++j;
            any = true;
        }
        if (!any || j >= body.size() || body[j] != '\'') {
            throw ParseError(ParseError::Kind::MalformedStep,
                             "malformed step label", plan_number,
                             static_cast<int>(out.size()) + 1);
        }
        ++j;
        // The tuple closes at the first ')' whose next non-space character
        // is not a quote; quotes after ')' belong to nested skill calls.
        size_t close = std::string::npos;
        for (size_t k = j; k < body.size(); ++k) {
            if (body[k] != ')') continue;
            size_t m = k + 1;
            skip_ws(body, m);
            if (m >= body.size() || body[m] != '\'') {
                close = k;
                break;
            }
        }
        if (close == std::string::npos)
            throw ParseError(ParseError::Kind::MalformedStep,
                             "unterminated step tuple", plan_number, num);
        out.push_back({num, body.substr(j, close - j)});
        i = close + 1;
    }
    return out;
}

// Extracts the quoted fields of a step tuple remainder: leading commas and
// quotes are structural, quote characters inside a field only appear in
// nested skill calls (field 1).
std::vector<std::string> tuple_fields(const std::string& rest,
                                      int plan_number, int step_number) {
    std::vector<std::string> fields;
    size_t i = 0;
    while (true) {
        skip_ws(rest, i);
        if (i >= rest.size()) break;
        if (rest[i] != ',')
            throw ParseError(ParseError::Kind::MalformedStep,
                             "malformed step tuple: " + rest, plan_number,
                             step_number);
        ++i;
        skip_ws(rest, i);
        if (i >= rest.size() || rest[i] != '\'')
            throw ParseError(ParseError::Kind::MalformedStep,
                             "expected quoted field: " + rest, plan_number,
                             step_number);
        ++i;
        // A field ends at a quote followed (modulo spaces) by ',' or end.
        size_t end = std::string::npos;
        for (size_t k = i; k < rest.size(); ++k) {
            if (rest[k] != '\'') continue;
            size_t m = k + 1;
            skip_ws(rest, m);
            if (m >= rest.size() || rest[m] == ',') {
                end = k;
                break;
            }
        }
        if (end == std::string::npos)
            throw ParseError(ParseError::Kind::MalformedStep,
                             "unterminated field: " + rest, plan_number,
                             step_number);
        fields.push_back(rest.substr(i, end - i));
        i = end + 1;
    }
    if (fields.empty())
        throw ParseError(ParseError::Kind::MalformedStep,
                         "empty step tuple", plan_number, step_number);
    return fields;
}

}  // namespace

std::vector<SkillLevelPlan> parse_skill_plans(const std::string& text) {
    const auto blocks = plan_blocks(text, kBeginPlanMarker, kEndPlanMarker);
    std::vector<SkillLevelPlan> plans;
    for (const auto& block : blocks) {
        SkillLevelPlan plan;
        auto tuples = step_tuples(block.body, block.plan_number);
        std::sort(tuples.begin(), tuples.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [num, rest] : tuples) {
            const auto fields = tuple_fields(rest, block.plan_number, num);
            plan.steps.push_back(
                parse_skill_call(fields[0], block.plan_number, num));
        }
        if (!plan.steps.empty()) plans.push_back(std::move(plan));
    }
    if (plans.empty())
        throw ParseError(ParseError::Kind::Empty, "no plans in answer");
    return plans;
}

std::string evaluation_to_answer_text(
    const std::vector<SkillLevelPlan>& plans,
    const std::vector<std::vector<double>>& rewards) {
    std::ostringstream out;
    out << kBeginEvalMarker << "\n";
    for (size_t p = 0; p < plans.size(); ++p) {
        out << "\nPlan" << (p + 1) << ": [\n";
        for (size_t s = 0; s < plans[p].steps.size(); ++s) {
            out << "\n('step" << (s + 1) << "', '"
                << format_skill_call(plans[p].steps[s]) << "', 'reward: "
                << rewards[p][s] << "'),\n";
        }
        out << "\n],\n";
    }
    out << "\n" << kEndEvalMarker << "\n";
    return out.str();
}

ParsedEvaluation parse_evaluation(const std::string& text) {
    const auto blocks = plan_blocks(text, kBeginEvalMarker, kEndEvalMarker);
    ParsedEvaluation out;
    for (const auto& block : blocks) {
        for (const auto& [num, rest] : step_tuples(block.body,
                                                   block.plan_number)) {
            const auto fields = tuple_fields(rest, block.plan_number, num);
            if (fields.size() < 2)
                throw ParseError(ParseError::Kind::MalformedStep,
                                 "evaluation tuple needs skill and reward",
                                 block.plan_number, num);
            EvaluationEntry entry;
            entry.step = parse_skill_call(fields[0], block.plan_number, num);
            std::string rtext = fields.back();
            const std::string prefix = "reward:";
            size_t pos = rtext.find(prefix);
            if (pos == std::string::npos)
                throw ParseError(ParseError::Kind::NonNumericReward,
                                 "missing reward field: " + rtext,
                                 block.plan_number, num);
            rtext = rtext.substr(pos + prefix.size());
            try {
                size_t used = 0;
                entry.r = std::stod(rtext, &used);
                // Reject trailing junk such as "reward: high".
                for (size_t k = used; k < rtext.size(); ++k) {
                    if (!std::isspace(static_cast<unsigned char>(rtext[k])))
                        throw std::invalid_argument("trailing");
                }
            } catch (const std::exception&) {
                throw ParseError(ParseError::Kind::NonNumericReward,
                                 "non-numeric reward: " + rtext,
                                 block.plan_number, num);
            }
            if (entry.r < 0.0 || entry.r > 1.0) {
                out.warnings.push_back(
                    "plan " + std::to_string(block.plan_number) + " step " +
                    std::to_string(num) + ": reward " +
                    std::to_string(entry.r) + " clamped into [0, 1]");
                entry.r = std::clamp(entry.r, 0.0, 1.0);
            }
            entry.executable = entry.r != 0.0;
            out.entries[{block.plan_number, num}] = std::move(entry);
        }
    }
    if (out.entries.empty())
        throw ParseError(ParseError::Kind::Empty, "no evaluations in answer");
    return out;
}

bool parse_yes_no(const std::string& text) {
    // First standalone Yes/No token wins.
    for (size_t i = 0; i < text.size(); ++i) {
        auto word_at = [&](const char* w, size_t len) {
            if (text.compare(i, len, w) != 0) return false;
            const bool left_ok =
                i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
            const bool right_ok =
                i + len >= text.size() ||
                !std::isalnum(static_cast<unsigned char>(text[i + len]));
            return left_ok && right_ok;
        };
        if (word_at("Yes", 3)) return true;
        if (word_at("No", 2)) return false;
    }
    throw ParseError(ParseError::Kind::Empty,
                     "reply contains neither \"Yes\" nor \"No\"");
}

}  // namespace ainav
