#include "ainav/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace ainav {

namespace {

using Json = nlohmann::ordered_json;

SceneObject obj(std::string id, ObjectKind kind, double x, double y,
                double l, double w, double h, bool movable = false,
                PushClass pc = PushClass::Light) {
    SceneObject o;
    o.id = std::move(id);
    o.kind = kind;
    o.pose = Pose3{x, y, 0.0, 0.0};
    o.size = ObjectSize{l, w, h};
    o.movable = movable;
    o.push_class = pc;
    return o;
}

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt3(*v) : "-";
}

const char* const kFailureColumns[] = {
    "SceneUnderstandingError", "IncorrectTaskDecomposition",
    "SkillExecutionUnfinished", "IntraSkillFailure",
    "SkillTransitionFailure",  "error",
};

}  // namespace

std::string to_string(Task t) {
    switch (t) {
        case Task::BoxObstruction: return "box_obstruction";
        case Task::BoxUsage: return "box_usage";
        case Task::StairBuilding: return "stair_building";
    }
    return {};
}

std::string to_string(Difficulty d) {
    switch (d) {
        case Difficulty::L: return "L";
        case Difficulty::M: return "M";
        case Difficulty::H: return "H";
    }
    return {};
}

Task task_from_string(const std::string& s) {
    if (s == "box_obstruction") return Task::BoxObstruction;
    if (s == "box_usage") return Task::BoxUsage;
    if (s == "stair_building") return Task::StairBuilding;
    throw std::invalid_argument("unknown task: " + s);
}

Difficulty difficulty_from_string(const std::string& s) {
    if (s == "L") return Difficulty::L;
    if (s == "M") return Difficulty::M;
    if (s == "H") return Difficulty::H;
    throw std::invalid_argument("unknown difficulty: " + s);
}

Scenario generate_scenario(Task task, Difficulty difficulty, uint64_t seed) {
    Scenario s;
    s.scenario_id = to_string(task) + "_" + to_string(difficulty) + "_seed" +
                    std::to_string(seed);
    s.bounds = Bounds{0.0, 0.0, 12.0, 8.0};
    s.robot_start = Pose3{1.5, 4.0, 0.0, 0.0};
    s.goal = Pose3{10.5, 4.0, 0.0, 0.0};

    switch (task) {
        case Task::BoxObstruction:
            // A wall divides the arena; the doorway is clear (L), blocked by
            // a light box (M), or plugged end-to-end by a heavy box (H) with
            // a light box in the approach lane. H's only initial plan is the
            // aside-push of the plug; its stall proves the plug immovable,
            // after which the light box becomes a step for climbing over it.
            switch (difficulty) {
                case Difficulty::L:
                    s.objects = {
                        obj("wall_1", ObjectKind::Wall, 5.75, 1.4, 0.3, 2.8,
                            2.0),
                        obj("wall_2", ObjectKind::Wall, 5.75, 6.6, 0.3, 2.8,
                            2.0),
                        obj("box_1", ObjectKind::Box, 4.5, 6.5, 0.5, 0.5,
                            0.4, true),
                    };
                    break;
                case Difficulty::M:
                    s.objects = {
                        obj("wall_1", ObjectKind::Wall, 5.75, 1.7, 0.3, 3.4,
                            2.0),
                        obj("wall_2", ObjectKind::Wall, 5.75, 6.3, 0.3, 3.4,
                            2.0),
                        obj("box_1", ObjectKind::Box, 5.75, 4.0, 0.4, 0.8,
                            0.4, true),
                    };
                    break;
                case Difficulty::H:
                    s.objects = {
                        obj("wall_1", ObjectKind::Wall, 5.75, 1.6, 0.3, 3.2,
                            2.0),
                        obj("wall_2", ObjectKind::Wall, 5.75, 6.7, 0.3, 2.6,
                            2.0),
                        obj("box_1", ObjectKind::Box, 5.75, 4.0, 0.4, 2.0,
                            0.4, true, PushClass::Heavy),
                        obj("box_2", ObjectKind::Box, 4.9, 4.8, 0.4, 0.5,
                            0.25, true),
                    };
                    break;
            }
            break;

        case Task::BoxUsage:
            // A hurdle spans the full arena width. L offers a fixed step in
            // place, M a box to push against it, H hides the usable box
            // behind a wall while a heavy decoy sits in view.
            s.objects = {
                obj("hurdle_1", ObjectKind::Hurdle, 6.0, 4.0, 0.3, 8.0,
                    0.45),
            };
            switch (difficulty) {
                case Difficulty::L:
                    // Step platforms flush on both hurdle faces: the 0.45 m
                    // crossing decomposes into climbable 0.25/0.20 steps.
                    s.objects.push_back(obj("platform_1",
                                            ObjectKind::Platform, 5.6, 4.0,
                                            0.5, 1.2, 0.25));
                    s.objects.push_back(obj("platform_2",
                                            ObjectKind::Platform, 6.4, 4.0,
                                            0.5, 1.2, 0.25));
                    break;
                case Difficulty::M:
                    s.objects.push_back(obj("box_1", ObjectKind::Box, 3.5,
                                            2.0, 0.5, 0.5, 0.25, true));
                    break;
                case Difficulty::H:
                    s.objects.push_back(obj("wall_1", ObjectKind::Wall, 3.5,
                                            6.3, 0.3, 3.4, 2.0));
                    s.objects.push_back(obj("box_1", ObjectKind::Box, 3.2,
                                            3.0, 0.5, 0.5, 0.25, true,
                                            PushClass::Heavy));
                    s.objects.push_back(obj("box_2", ObjectKind::Box, 5.0,
                                            5.2, 0.5, 0.5, 0.25, true));
                    break;
            }
            break;

        case Task::StairBuilding:
            // The goal sits on a 0.5 m platform. L has a pre-built stair.
            // On M/H the platform's near face starts inside sensing range,
            // so the first belief already shows the goal unreachable; M
            // requires pushing a box as a step, H adds a heavy decoy box
            // closer to the platform.
            switch (difficulty) {
                case Difficulty::L:
                    s.goal = Pose3{9.5, 4.0, 0.5, 0.0};
                    s.objects = {
                        obj("platform_1", ObjectKind::Platform, 9.5, 4.0,
                            2.0, 2.0, 0.5),
                        obj("step_1", ObjectKind::Platform, 7.9, 4.0, 0.4,
                            1.2, 0.25),
                        obj("step_2", ObjectKind::Platform, 8.3, 4.0, 0.4,
                            1.2, 0.45),
                    };
                    break;
                case Difficulty::H:
                    s.objects.push_back(obj("box_3", ObjectKind::Box, 7.0,
                                            2.5, 0.5, 0.5, 0.25, true,
                                            PushClass::Heavy));
                    [[fallthrough]];
                case Difficulty::M:
                    s.goal = Pose3{8.4, 4.0, 0.5, 0.0};
                    s.objects.push_back(obj("platform_1",
                                            ObjectKind::Platform, 8.4, 4.0,
                                            2.0, 2.0, 0.5));
                    s.objects.push_back(obj("box_1", ObjectKind::Box, 4.0,
                                            3.0, 0.5, 0.5, 0.25, true));
                    s.objects.push_back(obj("box_2", ObjectKind::Box, 5.5,
                                            5.0, 0.5, 0.5, 0.45, true));
                    break;
            }
            break;
    }

    validate_scenario(s);
    return s;
}

CellMetrics compute_metrics(const std::vector<EpisodeResult>& episodes,
                            double budget) {
    CellMetrics m;
    m.trials = static_cast<int>(episodes.size());
    double ots = 0.0, pt = 0.0, et = 0.0, tls = 0.0;
    for (const auto& e : episodes) {
        if (e.success) {
            ++m.successes;
            ots += e.overall_time;
            pt += e.planning_time;
            et += e.execution_time;
            tls += e.trajectory_length;
        } else {
            m.failure_histogram[e.failure ? to_string(*e.failure)
                                          : "error"]++;
        }
    }
    if (m.trials > 0) m.sr = static_cast<double>(m.successes) / m.trials;
    if (m.successes > 0) {
        m.ots = ots / m.successes;
        m.pt = pt / m.successes;
        m.et = et / m.successes;
        m.tls = tls / m.successes;
    }
    m.ot = m.sr * m.ots.value_or(0.0) + (1.0 - m.sr) * budget;
    return m;
}

SuiteResult run_suite(const SuiteConfig& cfg, const BackendFactory& factory) {
    struct Job {
        Task task;
        Difficulty difficulty;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (Task t : cfg.tasks)
        for (Difficulty d : cfg.difficulties)
            for (int i = 0; i < cfg.trials; ++i)
                jobs.push_back({t, d, cfg.seed + static_cast<uint64_t>(i)});

    std::vector<EpisodeRecord> records(jobs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < jobs.size();
             i = next.fetch_add(1)) {
            const Job& job = jobs[i];
            EpisodeRecord& rec = records[i];
            rec.task = job.task;
            rec.difficulty = job.difficulty;
            rec.seed = job.seed;
            try {
                const Scenario sc =
                    generate_scenario(job.task, job.difficulty, job.seed);
                EpisodeConfig ec = cfg.episode;
                ec.seed = job.seed;
                auto backend = factory();
                rec.result = run_episode(sc, *backend, ec);
            } catch (const std::exception& e) {
                rec.result = EpisodeResult{};
                rec.result.failure = FailureClass::IntraSkillFailure;
                rec.result.termination_reason =
                    std::string("harness error: ") + e.what();
            }
        }
    };

    unsigned n = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                 : std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    n = static_cast<unsigned>(
        std::min<size_t>(n, std::max<size_t>(jobs.size(), 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!cfg.trace_dir.empty()) {
        std::filesystem::create_directories(cfg.trace_dir);
        for (const auto& rec : records) {
            const std::string name = to_string(rec.task) + "_" +
                                     to_string(rec.difficulty) + "_seed" +
                                     std::to_string(rec.seed) + ".ndjson";
            std::ofstream out(std::filesystem::path(cfg.trace_dir) / name);
            out << rec.result.trace_ndjson();
        }
    }

    SuiteResult res;
    res.episodes = std::move(records);
    size_t idx = 0;
    for (Task t : cfg.tasks) {
        for (Difficulty d : cfg.difficulties) {
            std::vector<EpisodeResult> cell;
            double budget = ConstraintSet{}.sim_time_budget;
            for (int i = 0; i < cfg.trials; ++i, ++idx) {
                cell.push_back(res.episodes[idx].result);
            }
            if (cfg.trials > 0)
                budget = generate_scenario(t, d, cfg.seed)
                             .constraints.sim_time_budget;
            CellResult cr;
            cr.task = t;
            cr.difficulty = d;
            cr.metrics = compute_metrics(cell, budget);
            res.cells.push_back(std::move(cr));
        }
    }
    return res;
}

std::string report_csv(const SuiteResult& r) {
    std::ostringstream out;
    out << "task,difficulty,trials,successes,sr,ot,ots,pt,et,tls";
    for (const char* col : kFailureColumns) out << ',' << col;
    out << '\n';
    for (const auto& c : r.cells) {
        const CellMetrics& m = c.metrics;
        out << to_string(c.task) << ',' << to_string(c.difficulty) << ','
            << m.trials << ',' << m.successes << ',' << fmt3(m.sr) << ','
            << fmt3(m.ot) << ',' << fmt_opt(m.ots) << ',' << fmt_opt(m.pt)
            << ',' << fmt_opt(m.et) << ',' << fmt_opt(m.tls);
        for (const char* col : kFailureColumns) {
            auto it = m.failure_histogram.find(col);
            out << ',' << (it == m.failure_histogram.end() ? 0 : it->second);
        }
        out << '\n';
    }
    return out.str();
}

std::string report_json(const SuiteResult& r) {
    Json j;
    j["cells"] = Json::array();
    for (const auto& c : r.cells) {
        const CellMetrics& m = c.metrics;
        Json cj;
        cj["task"] = to_string(c.task);
        cj["difficulty"] = to_string(c.difficulty);
        cj["trials"] = m.trials;
        cj["successes"] = m.successes;
        cj["sr"] = m.sr;
        cj["ot"] = m.ot;
        cj["ots"] = m.ots ? Json(*m.ots) : Json(nullptr);
        cj["pt"] = m.pt ? Json(*m.pt) : Json(nullptr);
        cj["et"] = m.et ? Json(*m.et) : Json(nullptr);
        cj["tls"] = m.tls ? Json(*m.tls) : Json(nullptr);
        cj["failures"] = m.failure_histogram;
        j["cells"].push_back(std::move(cj));
    }
    j["episodes"] = Json::array();
    for (const auto& rec : r.episodes) {
        const EpisodeResult& e = rec.result;
        Json ej;
        ej["task"] = to_string(rec.task);
        ej["difficulty"] = to_string(rec.difficulty);
        ej["seed"] = rec.seed;
        ej["success"] = e.success;
        ej["termination_reason"] = e.termination_reason;
        ej["failure_class"] =
            e.failure ? Json(to_string(*e.failure)) : Json(nullptr);
        ej["overall_time"] = e.overall_time;
        ej["planning_time"] = e.planning_time;
        ej["execution_time"] = e.execution_time;
        ej["trajectory_length"] = e.trajectory_length;
        ej["replans"] = e.replans;
        ej["skills_executed"] = e.skills_executed;
        j["episodes"].push_back(std::move(ej));
    }
    return j.dump(2) + "\n";
}

std::string report_markdown(const SuiteResult& r) {
    std::ostringstream out;
    out << "| task | difficulty | SR | OT | OTS | PT | ET | TLS |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& c : r.cells) {
        const CellMetrics& m = c.metrics;
        out << "| " << to_string(c.task) << " | " << to_string(c.difficulty)
            << " | " << fmt3(m.sr) << " | " << fmt3(m.ot) << " | "
            << fmt_opt(m.ots) << " | " << fmt_opt(m.pt) << " | "
            << fmt_opt(m.et) << " | " << fmt_opt(m.tls) << " |\n";
    }
    return out.str();
}

}  // namespace ainav
