#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fleetscrub/errors.hpp"
#include "fleetscrub/pipeline.hpp"

using namespace fleetscrub;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fleetscrub: conformal disk-health scoring and scrub scheduling"};
    app.require_subcommand(1);

    std::string config_path;
    PipelineConfig config;
    auto* opt_config = app.add_option("--config", config_path, "JSON config file")
                           ->envname("FLEETSCRUB_CONFIG");
    std::uint64_t seed = 0;
    auto* opt_seed = app.add_option("--seed", seed, "RNG seed")->envname("FLEETSCRUB_SEED");
    std::string out_dir;
    auto* opt_out =
        app.add_option("--out", out_dir, "output directory")->envname("FLEETSCRUB_OUT");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse SMART and utilization logs");
    std::string data_path, schema_path, util_path, util_source;
    auto* opt_data = ingest->add_option("--data", data_path, "SMART CSV (14-column fleet layout)");
    auto* opt_schema = ingest->add_option("--schema", schema_path, "column schema JSON");
    auto* opt_util = ingest->add_option("--util", util_path, "utilization CSV (hour,pct)");
    auto* opt_source = ingest->add_option("--util-source", util_source, "disk_busy|cpu_busy")
                           ->check(CLI::IsMember({"disk_busy", "cpu_busy"}));

    // score
    auto* score = app.add_subcommand("score", "fit, calibrate, and score the fleet");
    int k = 0;
    std::string ncm, pvm;
    double threshold = 0.0, f_train = 0.0, f_cal = 0.0, f_test = 0.0;
    bool pooled = false, reuse = false;
    std::vector<double> epsilons, bucket_edges;
    auto* opt_k = score->add_option("--k", k, "kNN neighbor count")->check(CLI::PositiveNumber);
    auto* opt_ncm = score->add_option("--nonconformity", ncm, "margin|inverse_probability")
                        ->check(CLI::IsMember({"margin", "inverse_probability"}));
    auto* opt_pvm = score->add_option("--pvalue-mode", pvm, "conservative|paper")
                        ->check(CLI::IsMember({"conservative", "paper"}));
    score->add_flag("--pooled", pooled, "pooled (non-Mondrian) p-values");
    auto* opt_thresh =
        score->add_option("--threshold", threshold, "administrator threshold, e.g. 0.01");
    auto* opt_train = score->add_option("--train", f_train, "proper training fraction");
    auto* opt_cal = score->add_option("--cal", f_cal, "calibration fraction");
    auto* opt_test = score->add_option("--test", f_test, "test fraction");
    score->add_flag("--reuse", reuse, "reuse persisted model.json and calibration.json");
    auto* opt_eps = score->add_option("--epsilons", epsilons, "coverage epsilon grid");
    auto* opt_edges = score->add_option("--bucket-edges", bucket_edges, "histogram edges");

    // forecast
    auto* fcast = app.add_subcommand("forecast", "12-hour utilization forecast");
    int sets = 0, horizon = 0;
    std::string series_path, fc_source;
    auto* opt_sets = fcast->add_option("--sets", sets, "fuzzy set count")->check(CLI::Number);
    auto* opt_horizon = fcast->add_option("--horizon", horizon, "forecast steps");
    fcast->add_option("--series", series_path, "utilization CSV (default: ingested)");
    auto* opt_fc_source = fcast->add_option("--util-source", fc_source, "disk_busy|cpu_busy")
                              ->check(CLI::IsMember({"disk_busy", "cpu_busy"}));

    // schedule
    auto* sched = app.add_subcommand("schedule", "assign scrub windows and simulate");
    int today = 0, window_start = 0, capacity = 0, duration = 0;
    int cycle_a = 0, cycle_b = 0, cycle_c = 0;
    double idle = 0.0, watts = 0.0;
    bool dry_run = false;
    std::string actual_path, forecast2_path;
    auto* opt_today = sched->add_option("--today", today, "day index for due computation");
    int sched_horizon = 0;
    auto* opt_sched_horizon =
        sched->add_option("--horizon", sched_horizon, "window length in hours");
    auto* opt_ws = sched->add_option("--window-start", window_start,
                                     "absolute hour of forecast step 0");
    auto* opt_idle = sched->add_option("--idle-threshold", idle, "idle utilization %");
    auto* opt_cap = sched->add_option("--capacity", capacity, "max scrub starts per hour");
    auto* opt_dur = sched->add_option("--duration", duration, "scrub duration hours");
    auto* opt_watts = sched->add_option("--watts", watts, "per-disk power draw");
    auto* opt_ca = sched->add_option("--cycle-a", cycle_a, "cycle A period days");
    auto* opt_cb = sched->add_option("--cycle-b", cycle_b, "cycle B period days");
    auto* opt_cc = sched->add_option("--cycle-c", cycle_c, "cycle C period days");
    sched->add_flag("--dry-run", dry_run, "emit the schedule, skip the simulation");
    sched->add_option("--actual", actual_path, "actual utilization CSV for the window");
    sched->add_option("--forecast2", forecast2_path,
                      "second forecast CSV; schedules on the pointwise max");

    // report
    auto* report = app.add_subcommand("report", "print a consolidated run summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (opt_config->count()) config = PipelineConfig::from_file(config_path);
        if (opt_seed->count()) config.seed = seed;
        if (opt_out->count()) config.out_dir = out_dir;

        const auto start = std::chrono::steady_clock::now();
        if (ingest->parsed()) {
            if (opt_data->count()) config.dataset_path = data_path;
            if (opt_schema->count()) config.schema_path = schema_path;
            if (opt_util->count()) config.utilization_path = util_path;
            if (opt_source->count())
                config.util_source = util_source == "cpu_busy" ? UtilizationSource::cpu_busy
                                                               : UtilizationSource::disk_busy;
            auto result = pipeline::run_ingest(config);
            pipeline::update_manifest(config, "ingest", result, ms_since(start));
            std::cout << "ingest: wrote " << result.artifacts.size() << " artifacts to "
                      << config.out_dir << '\n';
        } else if (score->parsed()) {
            if (opt_k->count()) config.k = k;
            if (opt_ncm->count()) config.nonconformity = nonconformity_mode_from_string(ncm);
            if (opt_pvm->count()) config.pvalue_mode = pvalue_mode_from_string(pvm);
            if (pooled) config.mondrian = false;
            if (opt_thresh->count()) config.threshold = threshold;
            if (opt_train->count()) config.train_fraction = f_train;
            if (opt_cal->count()) config.calibration_fraction = f_cal;
            if (opt_test->count()) config.test_fraction = f_test;
            if (opt_eps->count()) config.epsilons = epsilons;
            if (opt_edges->count()) config.bucket_edges = bucket_edges;
            auto result = pipeline::run_score(config, reuse);
            pipeline::update_manifest(config, "score", result, ms_since(start));
            std::cout << "score: wrote " << result.artifacts.size() << " artifacts to "
                      << config.out_dir << '\n';
        } else if (fcast->parsed()) {
            if (opt_sets->count()) config.fuzzy_sets = sets;
            if (opt_horizon->count()) config.horizon = horizon;
            if (opt_fc_source->count())
                config.util_source = fc_source == "cpu_busy" ? UtilizationSource::cpu_busy
                                                             : UtilizationSource::disk_busy;
            auto result = pipeline::run_forecast(config, series_path);
            pipeline::update_manifest(config, "forecast", result, ms_since(start));
            std::cout << "forecast: wrote " << result.artifacts.size() << " artifacts to "
                      << config.out_dir << '\n';
        } else if (sched->parsed()) {
            if (opt_today->count()) config.today = today;
            if (opt_sched_horizon->count()) config.horizon = sched_horizon;
            if (opt_ws->count()) config.window_start_hour = window_start;
            if (opt_idle->count()) config.scheduler.idle_threshold_pct = idle;
            if (opt_cap->count()) config.scheduler.hour_capacity = capacity;
            if (opt_dur->count()) config.scheduler.scrub_duration_hours = duration;
            if (opt_watts->count()) config.scheduler.power_watts = watts;
            if (opt_ca->count()) config.scheduler.cycle_periods[ScrubCycle::A_low] = cycle_a;
            if (opt_cb->count()) config.scheduler.cycle_periods[ScrubCycle::B_medium] = cycle_b;
            if (opt_cc->count()) config.scheduler.cycle_periods[ScrubCycle::C_high] = cycle_c;
            auto outcome = pipeline::run_schedule(config, dry_run, actual_path, forecast2_path);
            pipeline::update_manifest(config, "schedule", outcome.result, ms_since(start));
            if (outcome.no_idle_window)
                std::cerr << "warning: no idle window in the forecast horizon; "
                             "all due disks deferred\n";
            std::cout << "schedule: wrote " << outcome.result.artifacts.size()
                      << " artifacts to " << config.out_dir << '\n';
        } else if (report->parsed()) {
            std::cout << pipeline::run_report(config);
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
