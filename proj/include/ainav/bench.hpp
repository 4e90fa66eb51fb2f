#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ainav/agents.hpp"
#include "ainav/executor.hpp"
#include "ainav/world.hpp"

namespace ainav {

enum class Task { BoxObstruction, BoxUsage, StairBuilding };
enum class Difficulty { L, M, H };

std::string to_string(Task t);
std::string to_string(Difficulty d);
Task task_from_string(const std::string& s);            // box_obstruction...
Difficulty difficulty_from_string(const std::string& s);  // L | M | H

// Layouts are fixed per (task, difficulty); the seed only stamps the
// scenario id. Episode-to-episode variation comes from observation noise.
Scenario generate_scenario(Task task, Difficulty difficulty,
                           uint64_t seed = 0);

// One backend instance per episode keeps trials independent and the suite
// safe to parallelise.
using BackendFactory = std::function<std::unique_ptr<PlanningBackend>()>;

struct SuiteConfig {
    std::vector<Task> tasks{Task::BoxObstruction, Task::BoxUsage,
                            Task::StairBuilding};
    std::vector<Difficulty> difficulties{Difficulty::L, Difficulty::M,
                                         Difficulty::H};
    int trials = 10;
    uint64_t seed = 1;  // trial t of every cell runs with seed + t
    EpisodeConfig episode;
    int threads = 0;        // 0 = hardware concurrency
    std::string trace_dir;  // when set, one NDJSON trace file per episode
};

struct EpisodeRecord {
    Task task = Task::BoxObstruction;
    Difficulty difficulty = Difficulty::L;
    uint64_t seed = 0;
    EpisodeResult result;
};

// Success-conditioned means are absent when a cell has no successes and
// render as "-" in reports.
struct CellMetrics {
    int trials = 0;
    int successes = 0;
    double sr = 0.0;
    std::optional<double> ots;  // overall time on success
    std::optional<double> pt;   // planning time on success
    std::optional<double> et;   // execution time on success
    std::optional<double> tls;  // trajectory length on success
    double ot = 0.0;            // sr * ots + (1 - sr) * budget
    std::map<std::string, int> failure_histogram;
};

struct CellResult {
    Task task = Task::BoxObstruction;
    Difficulty difficulty = Difficulty::L;
    CellMetrics metrics;
};

struct SuiteResult {
    std::vector<CellResult> cells;      // tasks x difficulties, config order
    std::vector<EpisodeRecord> episodes;  // cell-major, trial order
};

CellMetrics compute_metrics(const std::vector<EpisodeResult>& episodes,
                            double budget);

SuiteResult run_suite(const SuiteConfig& cfg, const BackendFactory& factory);

std::string report_csv(const SuiteResult& r);
std::string report_json(const SuiteResult& r);
std::string report_markdown(const SuiteResult& r);

}  // namespace ainav
