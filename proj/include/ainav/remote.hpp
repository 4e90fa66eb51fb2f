#pragma once

#include <stdexcept>
#include <string>

#include "ainav/agents.hpp"

namespace ainav {

struct RemoteError : std::runtime_error {
    enum class Kind { AuthMissing, Config, Timeout, HttpStatus, Transport,
                      Parse };

    RemoteError(Kind k, const std::string& msg, int http_status = 0)
        : std::runtime_error(msg), kind(k), status(http_status) {}

    Kind kind;
    int status;  // HTTP status for Kind::HttpStatus, else 0
};

struct EndpointConfig {
    std::string endpoint;  // http://host:port/path of a chat-completion API
    std::string model;
    std::string api_key;
    double timeout_s = 60.0;
    int max_retries = 2;     // extra attempts after the first
    double backoff_s = 0.5;  // base of the exponential backoff

    // Reads AINAV_LLM_ENDPOINT, AINAV_LLM_MODEL, AINAV_LLM_API_KEY and
    // AINAV_LLM_TIMEOUT_S. Missing endpoint or model raises Kind::Config;
    // a missing key is tolerated here and rejected on first use.
    static EndpointConfig from_env();
};

struct RemoteResult {
    std::string text;
    double latency_s = 0.0;
    int attempts = 1;
};

// One chat-completion round trip. Raises AuthMissing before any network
// traffic when the key is empty; retries max_retries times with exponential
// backoff on 429, 5xx, timeouts and transport errors.
RemoteResult remote_complete(const EndpointConfig& cfg,
                             const std::string& prompt);

// LLM-role backend: renders the role prompt, calls the endpoint, parses the
// reply. Parse failures surface as RemoteError{Kind::Parse}.
class RemoteBackend : public PlanningBackend {
  public:
    explicit RemoteBackend(EndpointConfig cfg) : cfg_(std::move(cfg)) {}

    std::string name() const override { return "remote"; }
    std::vector<ObjectLevelPlan> propose_object_level(const AgentContext& ctx,
                                                      int n_plans) override;
    std::vector<SkillLevelPlan> propose_skill_level(
        const AgentContext& ctx, const std::vector<ObjectLevelPlan>& object_plans,
        int n_plans) override;
    std::map<int, NodeScore> evaluate_tree(const AgentContext& ctx,
                                           const PlanTree& tree,
                                           int anchor) override;
    Pose3 resolve(const AgentContext& ctx, const PlanStep& step) override;
    Interpretation advise(const AgentContext& ctx, const PlanTree& tree,
                          int anchor, const AdviceEvent& event) override;
    std::vector<SkillLevelPlan> arborist_additions(
        const AgentContext& ctx, const PlanTree& tree, int anchor,
        const Interpretation& interp) override;

    // Wall-clock spent inside completions (feeds the planning-time metric).
    double total_latency_s() const { return total_latency_s_; }
    int total_calls() const { return total_calls_; }

  private:
    std::string complete(const std::string& prompt);

    EndpointConfig cfg_;
    double total_latency_s_ = 0.0;
    int total_calls_ = 0;
};

}  // namespace ainav
