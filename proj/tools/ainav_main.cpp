#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ainav/bench.hpp"
#include "ainav/remote.hpp"
#include "ainav/rewards.hpp"

namespace {

using OJson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

std::string render_report(const ainav::SuiteResult& res,
                          const std::string& path) {
    auto ends_with = [&](const char* suf) {
        const std::string s(suf);
        return path.size() >= s.size() &&
               path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".json")) return ainav::report_json(res);
    if (ends_with(".md") || ends_with(".markdown"))
        return ainav::report_markdown(res);
    return ainav::report_csv(res);
}

// A sample file carries the reward kind plus raw joint/base/command inputs;
// absent fields keep their zero defaults.
OJson reward_from_sample(const std::string& text) {
    const OJson j = OJson::parse(text);
    ainav::JointSample js;
    ainav::BaseSample bs;
    ainav::CommandSample cs;
    if (j.contains("joints")) {
        const auto& jj = j["joints"];
        if (jj.contains("tau")) js.tau = jj["tau"].get<std::vector<double>>();
        if (jj.contains("qdd")) js.qdd = jj["qdd"].get<std::vector<double>>();
        if (jj.contains("q_star"))
            js.q_star = jj["q_star"].get<std::vector<double>>();
        if (jj.contains("q_star_prev"))
            js.q_star_prev = jj["q_star_prev"].get<std::vector<double>>();
    }
    if (j.contains("base")) {
        const auto& jb = j["base"];
        if (jb.contains("v")) bs.v = jb["v"].get<std::array<double, 3>>();
        if (jb.contains("omega"))
            bs.omega = jb["omega"].get<std::array<double, 3>>();
        if (jb.contains("x")) bs.x = jb["x"].get<std::array<double, 2>>();
        if (jb.contains("heading")) bs.heading = jb["heading"].get<double>();
        if (jb.contains("collisions"))
            bs.collisions = jb["collisions"].get<int>();
        if (jb.contains("t_air"))
            bs.t_air = jb["t_air"].get<std::array<double, 4>>();
    }
    if (j.contains("command")) {
        const auto& jc = j["command"];
        if (jc.contains("v_star"))
            cs.v_star = jc["v_star"].get<std::array<double, 2>>();
        if (jc.contains("omega_star_z"))
            cs.omega_star_z = jc["omega_star_z"].get<double>();
        if (jc.contains("x_star"))
            cs.x_star = jc["x_star"].get<std::array<double, 2>>();
        if (jc.contains("x_obj"))
            cs.x_obj = jc["x_obj"].get<std::array<double, 2>>();
        if (jc.contains("obj_heading"))
            cs.obj_heading = jc["obj_heading"].get<double>();
        if (jc.contains("x_obj_star"))
            cs.x_obj_star = jc["x_obj_star"].get<std::array<double, 2>>();
        if (jc.contains("obj_heading_star"))
            cs.obj_heading_star = jc["obj_heading_star"].get<double>();
    }
    const std::string kind = j.at("kind").get<std::string>();
    ainav::RewardBreakdown bd;
    if (kind == "walk")
        bd = ainav::walk_reward(js, bs, cs);
    else if (kind == "climb")
        bd = ainav::climb_reward(js, bs, cs);
    else if (kind == "navigation")
        bd = ainav::navigation_reward(js, bs, cs);
    else if (kind == "pushing")
        bd = ainav::pushing_reward(js, bs, cs);
    else
        throw std::invalid_argument("unknown reward kind: " + kind);

    OJson out;
    out["kind"] = kind;
    out["terms"] = OJson::array();
    for (const auto& t : bd.terms) {
        out["terms"].push_back({{"name", t.name},
                                {"raw", t.raw},
                                {"weight", t.weight},
                                {"weighted", t.weighted()}});
    }
    out["total"] = bd.total();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interactive navigation engine: plan over a primitive "
                 "skill tree, execute kinematic skills, replan on surprise."};
    app.require_subcommand(1);

    // --- run ---
    auto* run = app.add_subcommand("run", "Run benchmark episodes");
    std::string task_s, difficulty_s = "M", scenario_path;
    std::string backend_s = "rule", ablation_s = "none";
    std::string report_path, trace_dir;
    int trials = 10, threads = 0, n_plans = 5;
    uint64_t seed = 1;
    double gamma = 0.9, noise_k = 0.02;
    bool planning_free = false;
    run->add_option("--task", task_s,
                    "Task: box_obstruction | box_usage | stair_building "
                    "(omit to run all)");
    auto* difficulty_opt =
        run->add_option("--difficulty", difficulty_s, "Difficulty: L | M | H")
            ->capture_default_str();
    run->add_option("--scenario", scenario_path,
                    "Run a scenario JSON file instead of a generated task");
    run->add_option("--trials", trials, "Trials per scenario")
        ->capture_default_str();
    run->add_option("--backend", backend_s, "Planning backend: rule | remote")
        ->capture_default_str();
    run->add_option("--seed", seed, "Base seed; trial t uses seed+t")
        ->capture_default_str();
    run->add_option("--gamma", gamma, "Backpropagation discount")
        ->capture_default_str();
    run->add_option("--ablation", ablation_s,
                    "none | single | skill | noreplan | failureonly")
        ->capture_default_str();
    run->add_option("--n-plans", n_plans, "Max proposals per planning round")
        ->capture_default_str();
    run->add_option("--noise", noise_k,
                    "Observation noise scale (sigma per meter of distance)")
        ->capture_default_str();
    run->add_option("--threads", threads, "Worker threads (0 = hardware)")
        ->capture_default_str();
    run->add_flag("--planning-free", planning_free,
                  "Do not charge planning time against the sim budget");
    run->add_option("--report", report_path,
                    "Write report file (.csv, .json, or .md by extension)");
    run->add_option("--trace-dir", trace_dir,
                    "Write one NDJSON trace per episode into this directory");

    // --- scenario ---
    auto* scen = app.add_subcommand("scenario", "Emit a generated scenario");
    std::string sc_task = "box_obstruction", sc_difficulty = "M", sc_out;
    uint64_t sc_seed = 0;
    scen->add_option("--task", sc_task, "Task name")->capture_default_str();
    scen->add_option("--difficulty", sc_difficulty, "L | M | H")
        ->capture_default_str();
    scen->add_option("--seed", sc_seed, "Seed stamped into the scenario id")
        ->capture_default_str();
    scen->add_option("--out", sc_out, "Output path (default stdout)");

    // --- reward ---
    auto* rew = app.add_subcommand(
        "reward", "Print a reward breakdown for a JSON sample file");
    std::string rew_path;
    rew->add_option("sample", rew_path, "Sample JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (scen->parsed()) {
            const ainav::Scenario s = ainav::generate_scenario(
                ainav::task_from_string(sc_task),
                ainav::difficulty_from_string(sc_difficulty), sc_seed);
            const std::string text = ainav::scenario_to_json_text(s);
            if (sc_out.empty())
                std::cout << text;
            else
                write_file(sc_out, text);
            return kExitOk;
        }

        if (rew->parsed()) {
            std::cout << reward_from_sample(read_file(rew_path)).dump(2)
                      << "\n";
            return kExitOk;
        }

        // run
        ainav::SuiteConfig cfg;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.trace_dir = trace_dir;
        cfg.episode.gamma = gamma;
        cfg.episode.n_plans = n_plans;
        cfg.episode.noise_k = noise_k;
        cfg.episode.ablation = ainav::ablation_from_string(ablation_s);
        cfg.episode.accounting = planning_free
                                     ? ainav::TimeAccounting::PlanningFree
                                     : ainav::TimeAccounting::PlanningCounts;
        if (trials < 1) throw std::invalid_argument("--trials must be >= 1");

        ainav::BackendFactory factory;
        if (backend_s == "rule") {
            factory = [] {
                return std::make_unique<ainav::RuleBasedBackend>();
            };
        } else if (backend_s == "remote") {
            const ainav::EndpointConfig ec = ainav::EndpointConfig::from_env();
            factory = [ec] {
                return std::make_unique<ainav::RemoteBackend>(ec);
            };
        } else {
            throw std::invalid_argument("unknown backend: " + backend_s);
        }

        if (!scenario_path.empty()) {
            // Custom scenario: sequential trials, metrics over the set.
            const ainav::Scenario sc = ainav::load_scenario(scenario_path);
            std::vector<ainav::EpisodeResult> episodes;
            for (int t = 0; t < trials; ++t) {
                ainav::EpisodeConfig ec = cfg.episode;
                ec.seed = seed + static_cast<uint64_t>(t);
                auto backend = factory();
                episodes.push_back(ainav::run_episode(sc, *backend, ec));
                if (!trace_dir.empty()) {
                    std::filesystem::create_directories(trace_dir);
                    write_file((std::filesystem::path(trace_dir) /
                                (sc.scenario_id + "_seed" +
                                 std::to_string(ec.seed) + ".ndjson"))
                                   .string(),
                               episodes.back().trace_ndjson());
                }
            }
            const ainav::CellMetrics m = ainav::compute_metrics(
                episodes, sc.constraints.sim_time_budget);
            std::printf("%s: SR %.3f (%d/%d), OT %.3f\n",
                        sc.scenario_id.c_str(), m.sr, m.successes, m.trials,
                        m.ot);
            return kExitOk;
        }

        if (!task_s.empty())
            cfg.tasks = {ainav::task_from_string(task_s)};
        // A lone --task pins the default difficulty; bare runs cover all.
        if (difficulty_opt->count() > 0 || !task_s.empty())
            cfg.difficulties = {
                ainav::difficulty_from_string(difficulty_s)};
        const ainav::SuiteResult res = ainav::run_suite(cfg, factory);
        std::cout << ainav::report_markdown(res);
        if (!report_path.empty())
            write_file(report_path, render_report(res, report_path));
        return kExitOk;
    } catch (const ainav::RemoteError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ainav::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
