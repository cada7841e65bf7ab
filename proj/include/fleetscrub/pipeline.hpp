#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fleetscrub/conformal.hpp"
#include "fleetscrub/health.hpp"
#include "fleetscrub/pwfts.hpp"
#include "fleetscrub/scheduler.hpp"
#include "fleetscrub/smart_ingest.hpp"

namespace fleetscrub {

inline constexpr const char* kToolVersion = "0.1.0";

/// Effective settings for one run; every field has a default, a JSON config
/// file sets any subset, CLI flags override on top.
struct PipelineConfig {
    std::string dataset_path;
    std::string schema_path;
    std::string utilization_path;
    std::string out_dir = "out";

    std::uint64_t seed = 0;
    int k = 5;
    NonconformityMode nonconformity = NonconformityMode::margin;
    PValueMode pvalue_mode = PValueMode::conservative;
    bool mondrian = true;

    double train_fraction = 0.5;
    double calibration_fraction = 0.25;
    double test_fraction = 0.25;

    double threshold = 0.01;
    std::vector<ThresholdPolicy::Band> cycle_bands;  // empty -> default bands
    std::vector<double> bucket_edges = default_bucket_edges();
    std::vector<double> epsilons;  // empty -> 0.01..0.99 step 0.01

    int fuzzy_sets = 20;
    int horizon = 12;
    UtilizationSource util_source = UtilizationSource::disk_busy;

    SchedulerConfig scheduler;
    int today = 0;
    int window_start_hour = 0;

    SplitSpec split_spec() const;
    ThresholdPolicy policy() const;
    std::vector<double> epsilon_grid() const;

    void apply_json(const nlohmann::json& j);
    static PipelineConfig from_file(const std::string& path);
    nlohmann::json to_json() const;
    std::string config_hash() const;
};

namespace pipeline {

struct StageResult {
    std::vector<std::string> artifacts;  // paths relative to out_dir
};

StageResult run_ingest(const PipelineConfig& config);
StageResult run_score(const PipelineConfig& config, bool reuse_model);
StageResult run_forecast(const PipelineConfig& config, const std::string& series_path = "");

struct ScheduleOutcome {
    StageResult result;
    bool no_idle_window = false;
};
ScheduleOutcome run_schedule(const PipelineConfig& config, bool dry_run,
                             const std::string& actual_path = "",
                             const std::string& second_forecast_path = "");

/// Consolidated run summary; returns the text printed by the CLI.
std::string run_report(const PipelineConfig& config);

/// Records timing and artifact checksums for one stage in <out>/manifest.json.
void update_manifest(const PipelineConfig& config, const std::string& stage,
                     const StageResult& result, double elapsed_ms);

std::uint64_t fnv1a_file(const std::string& path);
std::string fnv1a_hex(std::uint64_t value);

}  // namespace pipeline

}  // namespace fleetscrub
