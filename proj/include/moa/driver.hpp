// Manifest-driven pipeline: per-unit analysis with a content-addressed cache
// (stage 1), IR linking, and demand-driven candidate validation (stage 2).
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "moa/engine.hpp"
#include "moa/wpa.hpp"

namespace moa {

// Command-line and manifest inputs. Optional fields override the manifest.
struct DriverConfig {
    std::filesystem::path manifest_path;
    int jobs = 1;
    std::optional<int64_t> path_budget;
    std::optional<int> loop_bound;
    std::optional<int> chain_cap;
    std::optional<bool> resolve_ref_aliases;
    std::optional<std::vector<std::string>> checkers;
    std::optional<std::filesystem::path> out_dir;
    bool exit_zero = false;
};

struct UnitOutcome {
    std::string unit;
    std::string status;  // "analyzed" | "cache_hit" | "error"
    std::vector<std::string> report_ids;
    std::vector<std::string> errors;
};

struct Timing {
    int64_t n_t_ns = 0;    // parse + lower: the build-cost baseline
    int64_t sa_ns = 0;     // per-unit exploration and checking
    int64_t wpa_ns = 0;    // link, call graph, and query validation
    int64_t queries = 0;
    double sa_x = 0.0;     // sa_ns / n_t_ns
    double wpa_x = 0.0;    // wpa_ns / n_t_ns
    double ta_x = 0.0;     // sa_x + wpa_x
    int64_t wp_avg_t_ns = 0;
};

struct RunSummary {
    int candidates = 0;
    int confirmed = 0;
    int false_positives = 0;
    std::vector<UnitOutcome> units;
    std::vector<std::string> errors;
    Timing timing;
    int exit_code = 0;
};

// Stage 1 only: analyze units (cache-aware), emit candidate reports and
// per-unit IR under the output directory.
RunSummary run_stage1(const DriverConfig& cfg);

// Stage 2 only: link the IR emitted by stage 1, turn on-disk candidate
// reports into queries, validate each, and emit whole-program reports.
RunSummary run_stage2(const DriverConfig& cfg);

// Both stages plus timing decomposition and summary.json.
RunSummary run_all(const DriverConfig& cfg);

}  // namespace moa
