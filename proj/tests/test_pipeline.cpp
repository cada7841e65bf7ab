#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fleetscrub/csv.hpp"
#include "fleetscrub/errors.hpp"
#include "fleetscrub/pipeline.hpp"
#include "synthetic.hpp"

using namespace fleetscrub;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Fleet CSV in the Baidu layout plus a utilization log, ready for ingest.
PipelineConfig demo_config(const TempDir& dir, const std::string& out_name) {
    auto fleet = testutil::gaussian_fleet(120, 0.15, 2.5, 1234, 3);
    save_canonical(fleet, dir.file("fleet.csv"));
    save_utilization(testutil::sinusoid_series(48, 45.0, 25.0, 24.0, 2.0, 5),
                     dir.file("util.csv"));
    PipelineConfig config;
    config.dataset_path = dir.file("fleet.csv");
    config.utilization_path = dir.file("util.csv");
    config.out_dir = dir.file(out_name);
    config.seed = 99;
    config.threshold = 0.05;
    return config;
}

}  // namespace

TEST_CASE("config JSON round-trip preserves the hash") {
    PipelineConfig config;
    config.seed = 7;
    config.k = 9;
    config.threshold = 0.02;
    config.scheduler.hour_capacity = 12;
    PipelineConfig other;
    other.apply_json(config.to_json());
    CHECK(other.config_hash() == config.config_hash());
    CHECK(other.k == 9);
    CHECK(other.scheduler.hour_capacity == 12);
}

TEST_CASE("custom cycle bands come from the config") {
    PipelineConfig config;
    config.threshold = 0.01;
    config.apply_json(nlohmann::json::parse(R"({"cycle_bands": [
        {"lo": 0.0, "hi": 0.5, "cycle": "C"},
        {"lo": 0.5, "hi": 0.9, "cycle": "B"},
        {"lo": 0.9, "hi": 0.99, "cycle": "A"}
    ]})"));
    auto policy = config.policy();
    REQUIRE(policy.cycle_bands.size() == 3);
    CHECK(policy.cycle_bands[1].cycle == ScrubCycle::B_medium);

    DiskHealth h;
    h.disk_index = 1;
    h.health_score = 0.6;
    h.concern = true;
    CHECK(map_to_cycle(h, policy) == ScrubCycle::B_medium);
}

TEST_CASE("fnv1a matches the published test vectors") {
    TempDir dir;
    auto empty = dir.file("empty");
    std::ofstream(empty).flush();
    CHECK(pipeline::fnv1a_hex(pipeline::fnv1a_file(empty)) == "cbf29ce484222325");
    auto a = dir.file("a");
    std::ofstream(a) << "a";
    CHECK(pipeline::fnv1a_hex(pipeline::fnv1a_file(a)) == "af63dc4c8601ec8c");
}

TEST_CASE("pipeline stages produce consistent artifacts") {
    TempDir dir;
    auto config = demo_config(dir, "out");

    auto ingest = pipeline::run_ingest(config);
    pipeline::update_manifest(config, "ingest", ingest, 1.0);
    CHECK(fs::exists(fs::path(config.out_dir) / "samples.csv"));
    CHECK(fs::exists(fs::path(config.out_dir) / "utilization.csv"));

    auto score = pipeline::run_score(config, false);
    pipeline::update_manifest(config, "score", score, 1.0);
    for (const char* name : {"model.json", "calibration.json", "pvalues.csv", "confusion.csv",
                             "disk_health.csv", "health_summary.json", "coverage.csv"})
        CHECK(fs::exists(fs::path(config.out_dir) / name));

    auto forecast = pipeline::run_forecast(config);
    CHECK(fs::exists(fs::path(config.out_dir) / "forecast.csv"));

    auto schedule = pipeline::run_schedule(config, false);
    CHECK(fs::exists(fs::path(config.out_dir) / "schedule.csv"));
    CHECK(fs::exists(fs::path(config.out_dir) / "energy.json"));
    CHECK(fs::exists(fs::path(config.out_dir) / "simulation.json"));

    // Health summary counts partition the fleet; energy obeys the identity.
    auto health = nlohmann::json::parse(slurp((fs::path(config.out_dir) /
                                               "health_summary.json").string()));
    CHECK(health.at("selected_count").get<std::int64_t>() +
              health.at("skipped_count").get<std::int64_t>() +
              health.at("replacement_count").get<std::int64_t>() ==
          health.at("fleet_size").get<std::int64_t>());
    auto energy = nlohmann::json::parse(slurp((fs::path(config.out_dir) /
                                               "energy.json").string()));
    CHECK(energy.at("saved_wh").get<double>() ==
          energy.at("scrub_all_energy_wh").get<double>() -
              energy.at("selected_energy_wh").get<double>());

    // Confusion counts cover every test row once per predictor.
    auto confusion = csv::read_lines((fs::path(config.out_dir) / "confusion.csv").string());
    REQUIRE(confusion.size() >= 5);
    long knn_total = 0, mcp_total = 0;
    for (std::size_t i = 1; i < confusion.size(); ++i) {
        auto fields = csv::split_fields(confusion[i]);
        if (fields.size() != 4) continue;
        long count = *csv::parse_int(fields[2]) + *csv::parse_int(fields[3]);
        (fields[0] == "knn" ? knn_total : mcp_total) += count;
    }
    CHECK(knn_total == mcp_total);
    CHECK(knn_total > 0);

    // Manifest lists every artifact with a checksum.
    auto manifest = nlohmann::json::parse(slurp((fs::path(config.out_dir) /
                                                 "manifest.json").string()));
    for (const auto& rel : score.artifacts)
        CHECK(manifest.at("stages").at("score").at("artifacts").contains(rel));

    auto report_text = pipeline::run_report(config);
    CHECK(report_text.find("fleet:") != std::string::npos);
    CHECK(fs::exists(fs::path(config.out_dir) / "report.json"));
}

TEST_CASE("score stage is deterministic for a fixed seed") {
    TempDir dir;
    auto config_a = demo_config(dir, "out_a");
    auto config_b = config_a;
    config_b.out_dir = dir.file("out_b");

    pipeline::run_ingest(config_a);
    pipeline::run_ingest(config_b);
    pipeline::run_score(config_a, false);
    pipeline::run_score(config_b, false);
    pipeline::run_forecast(config_a);
    pipeline::run_forecast(config_b);
    pipeline::run_schedule(config_a, false);
    pipeline::run_schedule(config_b, false);

    for (const char* name : {"samples.csv", "disk_health.csv", "pvalues.csv", "coverage.csv",
                             "health_summary.json", "forecast.csv", "schedule.csv",
                             "energy.json", "simulation.json"})
        CHECK(slurp(dir.file("out_a/") + name) == slurp(dir.file("out_b/") + name));
}

TEST_CASE("score reuses persisted model and calibration") {
    TempDir dir;
    auto config = demo_config(dir, "out");
    pipeline::run_ingest(config);
    pipeline::run_score(config, false);
    auto model_before = slurp(dir.file("out/model.json"));
    auto calibration_before = slurp(dir.file("out/calibration.json"));

    // A threshold sweep with --reuse must not refit; only the health mapping moves.
    config.threshold = 0.2;
    pipeline::run_score(config, true);
    CHECK(slurp(dir.file("out/model.json")) == model_before);
    CHECK(slurp(dir.file("out/calibration.json")) == calibration_before);
    auto summary = nlohmann::json::parse(slurp(dir.file("out/health_summary.json")));
    CHECK(summary.at("threshold").get<double>() == 0.2);
}

TEST_CASE("missing artifacts are reported as input errors") {
    TempDir dir;
    PipelineConfig config;
    config.out_dir = dir.file("empty_out");
    CHECK_THROWS_AS(pipeline::run_score(config, false), Error);
    CHECK_THROWS_AS(pipeline::run_schedule(config, true), Error);
    CHECK_THROWS_AS(pipeline::run_report(config), Error);
}

TEST_CASE("dry-run schedules without simulating") {
    TempDir dir;
    auto config = demo_config(dir, "out");
    pipeline::run_ingest(config);
    pipeline::run_score(config, false);
    pipeline::run_forecast(config);
    auto outcome = pipeline::run_schedule(config, true);
    CHECK(outcome.result.artifacts.size() == 3);
    CHECK(fs::exists(fs::path(config.out_dir) / "schedule.csv"));
    CHECK(fs::exists(fs::path(config.out_dir) / "energy.json"));
    CHECK_FALSE(fs::exists(fs::path(config.out_dir) / "simulation.json"));
}

namespace {

int cli_exit(const std::string& command) {
    int status = std::system(command.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("CLI exit codes: 0 success or warning, 2 input error") {
    const char* cli = std::getenv("FLEETSCRUB_CLI");
    if (cli == nullptr) return;  // only wired up under ctest

    TempDir dir;
    auto config = demo_config(dir, "out");

    SUBCASE("happy path and no-idle-window warning both exit 0") {
        // Constant 90% utilization forecasts above the idle threshold.
        save_utilization(testutil::sinusoid_series(48, 90.0, 0.0, 24.0, 0.0, 1),
                         dir.file("util.csv"));
        std::string base = std::string(cli) + " --seed 3 --out " + dir.file("out") + " ";
        CHECK(cli_exit(base + "ingest --data " + dir.file("fleet.csv") + " --util " +
                       dir.file("util.csv") + " >/dev/null 2>&1") == 0);
        CHECK(cli_exit(base + "score >/dev/null 2>&1") == 0);
        CHECK(cli_exit(base + "forecast >/dev/null 2>&1") == 0);
        CHECK(cli_exit(base + "schedule >/dev/null 2>&1") == 0);
        auto summary = nlohmann::json::parse(slurp(dir.file("out/schedule_summary.json")));
        CHECK(summary.at("no_idle_window").get<bool>() == true);
        CHECK(summary.at("assignments").get<int>() == 0);
    }
    SUBCASE("malformed input exits 2") {
        std::ofstream(dir.file("bad.csv")) << "1, 2, not-enough-columns\n";
        CHECK(cli_exit(std::string(cli) + " --out " + dir.file("out2") + " ingest --data " +
                       dir.file("bad.csv") + " >/dev/null 2>&1") == 2);
    }
    SUBCASE("missing artifacts exit 2") {
        CHECK(cli_exit(std::string(cli) + " --out " + dir.file("nothing") +
                       " score >/dev/null 2>&1") == 2);
    }
}
