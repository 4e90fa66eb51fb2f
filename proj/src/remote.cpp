#include "ainav/remote.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ainav/prompts.hpp"

namespace ainav {

namespace {

using nlohmann::json;

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_http_url(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0)
        throw RemoteError(RemoteError::Kind::Config,
                          "endpoint must start with http://: " + url);
    std::string rest = url.substr(scheme.size());
    ParsedUrl out;
    const auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest
                                                      : rest.substr(0, slash);
    if (slash != std::string::npos) out.path = rest.substr(slash);
    const auto colon = hostport.find(':');
    if (colon == std::string::npos) {
        out.host = hostport;
    } else {
        out.host = hostport.substr(0, colon);
        out.port = std::atoi(hostport.c_str() + colon + 1);
    }
    if (out.host.empty() || out.port <= 0)
        throw RemoteError(RemoteError::Kind::Config,
                          "endpoint host/port invalid: " + url);
    return out;
}

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string event_text(const AgentContext& ctx, const AdviceEvent& e) {
    switch (e.kind) {
        case AdviceEvent::Kind::Failure:
            return "skill execution failed at node " +
                   std::to_string(e.node_id) + ": " + e.detail;
        case AdviceEvent::Kind::NewObject:
            return "a new object " + e.object_id +
                   " entered the field of view. Known objects now: " +
                   ctx.object_descriptions;
        case AdviceEvent::Kind::Revaluation:
            return "object " + e.object_id + " was re-measured: " + e.detail;
    }
    return e.detail;
}

// Remaining selected steps under anchor, rendered as a plan text.
std::string current_plan_text(const PlanTree& tree, int anchor) {
    SkillLevelPlan plan;
    int cur = anchor;
    while (true) {
        int next = -1;
        for (int c : tree.node(cur).children) {
            if (tree.node(c).status == NodeStatus::Selected) {
                next = c;
                break;
            }
        }
        if (next < 0) break;
        plan.steps.push_back(tree.node(next).step);
        cur = next;
    }
    if (plan.steps.empty()) return "(no remaining steps)";
    return plans_to_answer_text({plan});
}

}  // namespace

EndpointConfig EndpointConfig::from_env() {
    EndpointConfig cfg;
    cfg.endpoint = env_or("AINAV_LLM_ENDPOINT", "");
    cfg.model = env_or("AINAV_LLM_MODEL", "");
    cfg.api_key = env_or("AINAV_LLM_API_KEY", "");
    const std::string timeout = env_or("AINAV_LLM_TIMEOUT_S", "");
    if (!timeout.empty()) {
        char* end = nullptr;
        const double v = std::strtod(timeout.c_str(), &end);
        if (end == timeout.c_str() || v <= 0.0)
            throw RemoteError(RemoteError::Kind::Config,
                              "AINAV_LLM_TIMEOUT_S must be a positive number");
        cfg.timeout_s = v;
    }
    if (cfg.endpoint.empty())
        throw RemoteError(RemoteError::Kind::Config,
                          "AINAV_LLM_ENDPOINT is not set");
    if (cfg.model.empty())
        throw RemoteError(RemoteError::Kind::Config,
                          "AINAV_LLM_MODEL is not set");
    return cfg;
}

RemoteResult remote_complete(const EndpointConfig& cfg,
                             const std::string& prompt) {
    if (cfg.api_key.empty())
        throw RemoteError(RemoteError::Kind::AuthMissing,
                          "AINAV_LLM_API_KEY is not set");
    const ParsedUrl url = parse_http_url(cfg.endpoint);

    const json body = {
        {"model", cfg.model},
        {"messages", json::array({json{{"role", "user"},
                                       {"content", prompt}}})},
    };
    const std::string payload = body.dump();

    const auto t0 = std::chrono::steady_clock::now();
    RemoteResult result;
    RemoteError last(RemoteError::Kind::Transport, "no attempt made");
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        result.attempts = attempt + 1;
        if (attempt > 0) {
            const double delay =
                cfg.backoff_s * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(
                std::chrono::duration<double>(delay));
        }
        httplib::Client cli(url.host, url.port);
        const auto secs = static_cast<time_t>(cfg.timeout_s);
        const auto usecs = static_cast<time_t>(
            (cfg.timeout_s - static_cast<double>(secs)) * 1e6);
        cli.set_connection_timeout(secs, usecs);
        cli.set_read_timeout(secs, usecs);
        cli.set_write_timeout(secs, usecs);

        httplib::Headers headers = {
            {"Authorization", "Bearer " + cfg.api_key},
        };
        auto res = cli.Post(url.path, headers, payload, "application/json");
        if (!res) {
            const bool timed_out = res.error() == httplib::Error::Read ||
                                   res.error() == httplib::Error::Write ||
                                   res.error() ==
                                       httplib::Error::ConnectionTimeout;
            last = RemoteError(timed_out ? RemoteError::Kind::Timeout
                                         : RemoteError::Kind::Transport,
                               "transport failure: " +
                                   httplib::to_string(res.error()));
            continue;
        }
        if (res->status != 200) {
            last = RemoteError(RemoteError::Kind::HttpStatus,
                               "endpoint returned status " +
                                   std::to_string(res->status),
                               res->status);
            if (retryable_status(res->status)) continue;
            result.latency_s =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
            throw last;
        }
        try {
            const json reply = json::parse(res->body);
            result.text =
                reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
        } catch (const json::exception& e) {
            result.latency_s =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
            throw RemoteError(RemoteError::Kind::Parse,
                              std::string("malformed completion payload: ") +
                                  e.what());
        }
        result.latency_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        return result;
    }
    throw last;
}

std::string RemoteBackend::complete(const std::string& prompt) {
    const RemoteResult res = remote_complete(cfg_, prompt);
    total_latency_s_ += res.latency_s;
    total_calls_ += 1;
    return res.text;
}

std::vector<ObjectLevelPlan> RemoteBackend::propose_object_level(
    const AgentContext& ctx, int n_plans) {
    (void)n_plans;  // the template's answer shape fixes five plans
    std::string constraints =
        "maximum climbing capability: " +
        fmt2(ctx.constraints.max_climb_height) +
        " meters; simulation time budget: " +
        fmt2(ctx.constraints.sim_time_budget) + " seconds";
    std::string library;
    for (size_t i = 0; i < ctx.skill_library.size(); ++i)
        library += (i ? ", " : "") + ctx.skill_library[i];
    const std::string prompt = render_prompt(
        Role::ObjectProposer,
        {{"goal point", "[" + fmt2(ctx.goal.x) + ", " + fmt2(ctx.goal.y) +
                            ", " + fmt2(ctx.goal.z) + "]"},
         {"scene understanding", ctx.scene_summary},
         {"object description", ctx.object_descriptions},
         {"skill library", library},
         {"constraints", constraints}});
    const std::string reply = complete(prompt);

    // Narrative blocks between the plan markers, split at "PlanN:".
    const auto begin = reply.find(kBeginPlanMarker);
    const auto end = reply.find(kEndPlanMarker);
    if (begin == std::string::npos || end == std::string::npos || end < begin)
        throw RemoteError(RemoteError::Kind::Parse,
                          "object-level reply lacks plan markers");
    const std::string region =
        reply.substr(begin + std::string(kBeginPlanMarker).size(),
                     end - begin - std::string(kBeginPlanMarker).size());
    std::vector<ObjectLevelPlan> out;
    size_t pos = 0;
    std::vector<size_t> starts;
    while ((pos = region.find("Plan", pos)) != std::string::npos) {
        size_t digits = pos + 4;
        while (digits < region.size() && std::isdigit(region[digits]))
            ++digits;
        if (digits > pos + 4 && digits < region.size() &&
            region[digits] == ':')
            starts.push_back(pos);
        pos += 4;
    }
    for (size_t i = 0; i < starts.size(); ++i) {
        const size_t from = starts[i];
        const size_t to =
            i + 1 < starts.size() ? starts[i + 1] : region.size();
        ObjectLevelPlan plan;
        plan.plan_id = static_cast<int>(i) + 1;
        plan.narrative = region.substr(from, to - from);
        for (const auto& id : ctx.belief.known_ids())
            if (plan.narrative.find(id) != std::string::npos)
                plan.objects_used.push_back(id);
        out.push_back(std::move(plan));
    }
    if (out.empty())
        throw RemoteError(RemoteError::Kind::Parse,
                          "object-level reply contains no plans");
    return out;
}

std::vector<SkillLevelPlan> RemoteBackend::propose_skill_level(
    const AgentContext& ctx, const std::vector<ObjectLevelPlan>& object_plans,
    int n_plans) {
    (void)n_plans;
    std::string library;
    for (size_t i = 0; i < ctx.skill_library.size(); ++i)
        library += (i ? ", " : "") + ctx.skill_library[i];
    std::string abstract;
    if (object_plans.empty()) {
        abstract = "(skill-level planning only; no abstract plans)";
    } else {
        for (const auto& p : object_plans) abstract += p.narrative + "\n";
    }
    const std::string prompt = render_prompt(
        Role::SkillProposer,
        {{"goal point", "[" + fmt2(ctx.goal.x) + ", " + fmt2(ctx.goal.y) +
                            ", " + fmt2(ctx.goal.z) + "]"},
         {"skill library", library},
         {"object-level plans", abstract}});
    const std::string reply = complete(prompt);
    std::vector<SkillLevelPlan> plans;
    try {
        plans = parse_skill_plans(reply);
    } catch (const ParseError& e) {
        throw RemoteError(RemoteError::Kind::Parse, e.what());
    }
    // Hallucination gate: every referenced object must exist in the belief.
    for (const auto& plan : plans) {
        for (const auto& step : plan.steps) {
            std::optional<std::string> ref =
                symbolic_object_id(step.symbolic_param);
            if (!step.object_id.empty()) ref = step.object_id;
            if (ref && !ctx.belief.find(*ref))
                throw RemoteError(RemoteError::Kind::Parse,
                                  "plan references unknown object " + *ref);
        }
    }
    return plans;
}

std::map<int, NodeScore> RemoteBackend::evaluate_tree(const AgentContext& ctx,
                                                      const PlanTree& tree,
                                                      int anchor) {
    const auto paths = anchor_leaf_paths(tree, anchor);
    if (paths.empty()) return {};
    std::vector<SkillLevelPlan> plans;
    for (const auto& path : paths) {
        SkillLevelPlan p;
        for (int id : path) p.steps.push_back(tree.node(id).step);
        plans.push_back(std::move(p));
    }
    std::string library;
    for (size_t i = 0; i < ctx.skill_library.size(); ++i)
        library += (i ? ", " : "") + ctx.skill_library[i];
    std::string constraints =
        "maximum climbing capability: " +
        fmt2(ctx.constraints.max_climb_height) +
        " meters; simulation time budget: " +
        fmt2(ctx.constraints.sim_time_budget) + " seconds";
    const std::string prompt = render_prompt(
        Role::Evaluator,
        {{"goal point", "[" + fmt2(ctx.goal.x) + ", " + fmt2(ctx.goal.y) +
                            ", " + fmt2(ctx.goal.z) + "]"},
         {"scene understanding", ctx.scene_summary},
         {"object description", ctx.object_descriptions},
         {"skill library", library},
         {"candidate plans", plans_to_answer_text(plans)},
         {"constraints", constraints}});
    const std::string reply = complete(prompt);
    ParsedEvaluation eval;
    try {
        eval = parse_evaluation(reply);
    } catch (const ParseError& e) {
        throw RemoteError(RemoteError::Kind::Parse, e.what());
    }
    // Merged nodes appear in several plans; the first plan's entry wins.
    std::map<int, NodeScore> scores;
    for (size_t p = 0; p < paths.size(); ++p) {
        for (size_t s = 0; s < paths[p].size(); ++s) {
            const auto it = eval.entries.find(
                {static_cast<int>(p) + 1, static_cast<int>(s) + 1});
            if (it == eval.entries.end()) continue;
            const int node = paths[p][s];
            if (scores.count(node)) continue;
            scores[node] = {it->second.r, it->second.executable};
        }
    }
    return scores;
}

Pose3 RemoteBackend::resolve(const AgentContext& ctx, const PlanStep& step) {
    const std::string prompt = render_prompt(
        Role::ParamCalc,
        {{"current plan", format_skill_call(step)},
         {"robot pose",
          "[" + fmt2(ctx.belief.robot_pose.x) + ", " +
              fmt2(ctx.belief.robot_pose.y) + ", " +
              fmt2(ctx.belief.robot_pose.z) + "], yaw " +
              fmt2(ctx.belief.robot_pose.yaw)},
         {"object description", ctx.object_descriptions}});
    const std::string reply = complete(prompt);
    // First "[x, y, z]" triple in the reply.
    size_t pos = 0;
    while ((pos = reply.find('[', pos)) != std::string::npos) {
        double x = 0, y = 0, z = 0;
        int consumed = 0;
        if (std::sscanf(reply.c_str() + pos, "[ %lf , %lf , %lf %n", &x, &y,
                        &z, &consumed) == 3 &&
            reply.find(']', pos) != std::string::npos) {
            Pose3 out{x, y, z, 0.0};
            out.yaw = std::atan2(y - ctx.belief.robot_pose.y,
                                 x - ctx.belief.robot_pose.x);
            return out;
        }
        ++pos;
    }
    throw RemoteError(RemoteError::Kind::Parse,
                      "param-calc reply lacks a [x, y, z] triple");
}

Interpretation RemoteBackend::advise(const AgentContext& ctx,
                                     const PlanTree& tree, int anchor,
                                     const AdviceEvent& event) {
    const std::string prompt = render_prompt(
        Role::Advisor,
        {{"goal point", "[" + fmt2(ctx.goal.x) + ", " + fmt2(ctx.goal.y) +
                            ", " + fmt2(ctx.goal.z) + "]"},
         {"object description", ctx.object_descriptions},
         {"current plan", current_plan_text(tree, anchor)},
         {"new observation", event_text(ctx, event)}});
    const std::string reply = complete(prompt);
    Interpretation out;
    out.kind = event.kind;
    out.node_id = event.node_id;
    out.object_id = event.object_id;
    out.detail = event.detail;
    try {
        out.replan = parse_yes_no(reply);
    } catch (const ParseError& e) {
        throw RemoteError(RemoteError::Kind::Parse, e.what());
    }
    out.suggestions = reply;
    return out;
}

std::vector<SkillLevelPlan> RemoteBackend::arborist_additions(
    const AgentContext& ctx, const PlanTree& tree, int anchor,
    const Interpretation& interp) {
    std::string constraints =
        "maximum climbing capability: " +
        fmt2(ctx.constraints.max_climb_height) +
        " meters; simulation time budget: " +
        fmt2(ctx.constraints.sim_time_budget) + " seconds";
    const std::string prompt = render_prompt(
        Role::Arborist,
        {{"goal point", "[" + fmt2(ctx.goal.x) + ", " + fmt2(ctx.goal.y) +
                            ", " + fmt2(ctx.goal.z) + "]"},
         {"object description", ctx.object_descriptions},
         {"constraints", constraints},
         {"current plan", current_plan_text(tree, anchor)},
         {"new observation", interp.detail},
         {"advisor suggestions", interp.suggestions}});
    const std::string reply = complete(prompt);
    try {
        return parse_skill_plans(reply);
    } catch (const ParseError& e) {
        throw RemoteError(RemoteError::Kind::Parse, e.what());
    }
}

}  // namespace ainav
