// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. argv[1] is the CLI binary, used by
// the end-to-end determinism criterion.

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fleetscrub/conformal.hpp"
#include "fleetscrub/health.hpp"
#include "fleetscrub/knn.hpp"
#include "fleetscrub/pwfts.hpp"
#include "fleetscrub/scheduler.hpp"
#include "fleetscrub/smart_ingest.hpp"
#include "synthetic.hpp"

using namespace fleetscrub;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

void skip(int id, const std::string& name, const std::string& why) {
    std::printf("[SKIP] criterion %d: %s (%s)\n", id, name.c_str(), why.c_str());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- criterion 1: bucket selection arithmetic ------------------------------

void check_selection_arithmetic() {
    BucketHistogram buckets;
    buckets.edges = default_bucket_edges();
    buckets.counts = {16468, 62928, 63087, 126244};
    auto result = select_below(buckets, 0.999, 349525);
    bool pass = result.selected == 79396 && std::abs(result.fraction_pct - 22.71) <= 0.05;
    criterion(1, "selection arithmetic",
              pass, "selected=" + std::to_string(result.selected) +
                        ", fraction=" + fmt(result.fraction_pct) + "%");
}

// ---- criterion 2: energy arithmetic ----------------------------------------

void check_energy_arithmetic() {
    SchedulerConfig config;  // 7 W, 6 h
    ScrubSchedule one;
    one.fleet_size = 1;
    one.assignments.push_back({0, 1, ScrubCycle::C_high, 0.5});
    UtilizationSeries quiet;
    for (int h = 0; h < 6; ++h) quiet.samples.push_back({h, 10.0});
    auto single = simulate(one, quiet, config);

    HealthReport summary;
    summary.selected_count = 28000;
    summary.skipped_count = 92000;
    auto energy = energy_report(summary, config);

    bool pass = single.energy_wh_spent == 42.0 && energy.saved_wh == 92000.0 * 42.0 &&
                energy.saved_wh == 3864000.0;
    criterion(2, "energy arithmetic", pass,
              "per-disk=" + fmt(single.energy_wh_spent) +
                  " Wh, saved=" + fmt(energy.saved_wh / 1000.0) + " kWh");
}

// ---- criterion 3: Mondrian class-conditional validity ----------------------

void check_mondrian_validity() {
    const std::vector<double> epsilons = {0.05, 0.10, 0.20};
    std::array<std::array<long, 2>, 3> misses{};
    std::array<long, 2> totals{};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto fleet = testutil::gaussian_fleet(10000, 0.05, 2.0, seed * 7919);
        auto split = split_dataset(fleet, SplitSpec{0.5, 0.25, 0.25, seed});
        auto model = fit_knn(split.train, 5);
        auto table = calibrate(model, split.calibration, NonconformityMode::margin,
                               PValueMode::conservative);
        for (const auto& row : split.test.rows) {
            auto pv = p_values(table, model, feature_vector(row, false));
            ++totals[row.label];
            for (std::size_t e = 0; e < epsilons.size(); ++e)
                if (!(pv.p[row.label] > epsilons[e])) ++misses[e][row.label];
        }
    }
    bool pass = true;
    std::ostringstream detail;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        for (int c = 0; c < 2; ++c) {
            double error = static_cast<double>(misses[e][c]) / static_cast<double>(totals[c]);
            pass = pass && error <= epsilons[e] + 0.02;
            if (c == 0) detail << "eps=" << epsilons[e] << " minority-error=" << fmt(error) << ' ';
        }
    }
    criterion(3, "Mondrian per-class validity", pass, detail.str());
}

// ---- criterion 4: confidence/credibility identities ------------------------

void check_confidence_identities() {
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool pass = true;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        PValueVector pv;
        pv.p = {unit(gen), unit(gen)};
        auto cc = confidence_credibility(pv);

        // sup/inf sweep over the epsilon grid, step 0.001
        double sweep_confidence = 0.0, sweep_credibility = 1.0;
        bool conf_found = false, cred_found = false;
        for (int g = 0; g <= 999 && !(conf_found && cred_found); ++g) {
            double eps = static_cast<double>(g) / 1000.0;
            auto set = prediction_set(pv, eps);
            if (!conf_found && set.size() <= 1) {
                sweep_confidence = 1.0 - eps;
                conf_found = true;
            }
            if (!cred_found && set.size() == 0) {
                sweep_credibility = eps;
                cred_found = true;
            }
        }
        double d1 = std::abs(cc.confidence - sweep_confidence);
        double d2 = std::abs(cc.credibility - sweep_credibility);
        worst = std::max({worst, d1, d2});
        pass = pass && d1 <= 0.001 + 1e-12 && d2 <= 0.001 + 1e-12;
    }
    criterion(4, "confidence/credibility identities", pass,
              "1000 pairs, max deviation=" + fmt(worst));
}

// ---- criterion 5: nestedness and coverage monotonicity ---------------------

void check_nestedness_and_monotonicity() {
    auto fleet = testutil::gaussian_fleet(2000, 0.10, 2.0, 31337);
    auto split = split_dataset(fleet, SplitSpec{0.5, 0.25, 0.25, 5});
    auto model = fit_knn(split.train, 5);
    auto table =
        calibrate(model, split.calibration, NonconformityMode::margin, PValueMode::conservative);

    std::vector<double> epsilons;
    for (int i = 1; i <= 20; ++i) epsilons.push_back(static_cast<double>(i) / 21.0);

    bool nested = true;
    for (const auto& row : split.test.rows) {
        auto pv = p_values(table, model, feature_vector(row, false));
        for (std::size_t e = 1; e < epsilons.size(); ++e) {
            auto low = prediction_set(pv, epsilons[e - 1]);
            auto high = prediction_set(pv, epsilons[e]);
            for (int c = 0; c < 2; ++c)
                if (high.contains[c] && !low.contains[c]) nested = false;
        }
    }
    auto report = evaluate_coverage(table, model, split.test, epsilons);
    bool monotone = true;
    for (std::size_t e = 1; e < report.rows.size(); ++e)
        if (report.rows[e].effective_coverage > report.rows[e - 1].effective_coverage)
            monotone = false;
    criterion(5, "prediction-set nestedness and coverage monotonicity", nested && monotone,
              std::string("nested=") + (nested ? "yes" : "no") + ", monotone=" +
                  (monotone ? "yes" : "no"));
}

// ---- criterion 6: health-to-cycle mapping ----------------------------------

void check_cycle_mapping() {
    auto policy = ThresholdPolicy::defaults(0.01);
    auto cycle_at = [&](double score) {
        DiskHealth h;
        h.disk_index = 1;
        h.health_score = score;
        h.concern = true;
        return map_to_cycle(h, policy);
    };
    bool pass = cycle_at(0.97) == ScrubCycle::A_low && cycle_at(0.85) == ScrubCycle::B_medium &&
                cycle_at(0.50) == ScrubCycle::C_high && cycle_at(0.95) == ScrubCycle::A_low &&
                cycle_at(0.80) == ScrubCycle::B_medium &&
                cycle_at(std::nextafter(0.95, 0.0)) == ScrubCycle::B_medium &&
                cycle_at(std::nextafter(0.80, 0.0)) == ScrubCycle::C_high;
    criterion(6, "scrub-cycle mapping", pass, "0.97->A 0.85->B 0.50->C, half-open edges");
}

// ---- criterion 7: PWFTS sanity and forecasting skill ------------------------

void check_pwfts() {
    bool sums_ok = true, constant_ok = true;

    auto noisy = testutil::sinusoid_series(300, 50.0, 30.0, 24.0, 2.0, 11);
    auto model = fit_pwfts(noisy, 20);
    auto dist = forecast(model, noisy.samples.back().utilization_pct, 12);
    for (const auto& step : dist.probs) {
        double sum = 0.0;
        for (double p : step) sum += p;
        if (std::abs(sum - 1.0) > 1e-9) sums_ok = false;
    }

    UtilizationSeries constant;
    for (int h = 0; h < 10; ++h) constant.samples.push_back({h, 50.0});
    auto cmodel = fit_pwfts(constant, 20);
    auto cdist = forecast(cmodel, 50.0, 12);
    for (double p : cdist.points)
        if (std::abs(p - 50.0) > cmodel.partition.set_width() + 1e-9) constant_ok = false;

    // 30 held-out windows against the persistence baseline.
    const int train_hours = 480, windows = 30, horizon = 12;
    auto series = testutil::sinusoid_series(train_hours + windows + horizon + 1, 50.0, 30.0,
                                            24.0, 2.0, 4711);
    UtilizationSeries train;
    train.samples.assign(series.samples.begin(), series.samples.begin() + train_hours);
    auto bench = fit_pwfts(train, 20);
    double se_model = 0.0, se_persist = 0.0;
    for (int w = 0; w < windows; ++w) {
        int anchor = train_hours + w;
        double last = series.samples[static_cast<std::size_t>(anchor)].utilization_pct;
        auto fc = forecast(bench, last, horizon);
        for (int h = 1; h <= horizon; ++h) {
            double actual = series.samples[static_cast<std::size_t>(anchor + h)].utilization_pct;
            se_model += (fc.points[h - 1] - actual) * (fc.points[h - 1] - actual);
            se_persist += (last - actual) * (last - actual);
        }
    }
    double rmse_model = std::sqrt(se_model / (windows * horizon));
    double rmse_persist = std::sqrt(se_persist / (windows * horizon));
    bool skill_ok = rmse_model < rmse_persist;

    criterion(7, "PWFTS sanity and skill", sums_ok && constant_ok && skill_ok,
              "rmse=" + fmt(rmse_model) + " vs persistence=" + fmt(rmse_persist));
}

// ---- criterion 8: scheduler contract ----------------------------------------

void check_scheduler_contract() {
    std::mt19937_64 gen(808);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool pass = true;

    for (int trial = 0; trial < 20 && pass; ++trial) {
        SchedulerConfig config;
        config.hour_capacity = 1 + static_cast<int>(gen() % 40);
        config.scrub_duration_hours = 1 + static_cast<int>(gen() % 8);
        std::vector<DiskHealth> disks;
        const int n = 50 + static_cast<int>(gen() % 951);  // up to ~1000 disks
        for (int d = 1; d <= n; ++d) {
            DiskHealth h;
            h.disk_index = d;
            h.point_label = kLabelFunctional;
            h.health_score = unit(gen);
            h.concern = true;
            h.cycle = static_cast<ScrubCycle>(gen() % 3);
            disks.push_back(h);
        }
        auto report = selection_summary(disks, default_bucket_edges());
        ForecastDistribution dist;
        dist.partition.centers = {50.0};
        for (int h = 0; h < 12; ++h) {
            dist.points.push_back(100.0 * unit(gen));
            dist.probs.push_back({1.0});
        }
        auto schedule = build_schedule(report, dist, config, 0);

        std::vector<int> load(12, 0);
        for (const auto& a : schedule.assignments) {
            if (!(dist.points[static_cast<std::size_t>(a.hour)] < config.idle_threshold_pct))
                pass = false;
            if (a.hour + config.scrub_duration_hours > 12) pass = false;
            ++load[static_cast<std::size_t>(a.hour)];
        }
        for (int count : load)
            if (count > config.hour_capacity) pass = false;
        for (std::size_t i = 1; i < schedule.assignments.size(); ++i)
            if (schedule.assignments[i - 1].health_score < schedule.assignments[i].health_score &&
                schedule.assignments[i - 1].hour > schedule.assignments[i].hour)
                pass = false;
    }

    // Cycle compliance: an always-idle fleet scrubs cycle-C disks every 7 days.
    SchedulerConfig config;
    std::vector<DiskHealth> disks;
    for (int d = 1; d <= 5; ++d) {
        DiskHealth h;
        h.disk_index = d;
        h.point_label = kLabelFunctional;
        h.health_score = 0.1 * d;
        h.concern = true;
        h.cycle = ScrubCycle::C_high;
        disks.push_back(h);
    }
    auto report = selection_summary(disks, default_bucket_edges());
    ForecastDistribution idle;
    idle.partition.centers = {50.0};
    for (int h = 0; h < 12; ++h) {
        idle.points.push_back(20.0);
        idle.probs.push_back({1.0});
    }
    std::map<int, int> due;
    std::map<int, std::vector<int>> scrub_days;
    for (int day = 0; day < 28; ++day) {
        auto schedule = build_schedule(report, idle, config, day, due);
        due = schedule.next_due;
        if (!schedule.deferred.empty()) pass = false;
        for (const auto& a : schedule.assignments) scrub_days[a.disk_index].push_back(day);
    }
    for (const auto& [disk, days] : scrub_days) {
        if (days.empty() || days.front() != 0) pass = false;
        for (std::size_t i = 1; i < days.size(); ++i)
            if (days[i] - days[i - 1] > 7) pass = false;
        if (days.size() < 4) pass = false;  // days 0, 7, 14, 21
    }
    criterion(8, "scheduler contract", pass,
              "feasibility, capacity, priority, 7-day cycle compliance");
}

// ---- criterion 9: end-to-end determinism ------------------------------------

int run_cli(const std::string& command) {
    int status = std::system(command.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void check_determinism(const std::string& cli) {
    if (cli.empty()) {
        criterion(9, "end-to-end determinism", false, "CLI binary path not supplied");
        return;
    }
    testutil::TempDir dir;
    auto fleet = testutil::gaussian_fleet(300, 0.12, 2.5, 20260810, 3);
    save_canonical(fleet, dir.file("fleet.csv"));
    save_utilization(testutil::sinusoid_series(48, 45.0, 25.0, 24.0, 2.0, 2), dir.file("util.csv"));

    bool pass = true;
    std::string detail = "byte-identical artifacts";
    for (const char* run : {"a", "b"}) {
        auto out = dir.file(std::string("out_") + run);
        std::ostringstream cmd;
        cmd << cli << " --seed 11 --out " << out << " ingest --data " << dir.file("fleet.csv")
            << " --util " << dir.file("util.csv") << " > /dev/null";
        if (run_cli(cmd.str()) != 0) pass = false;
        for (const char* stage : {"score", "forecast", "schedule"}) {
            std::ostringstream c;
            c << cli << " --seed 11 --out " << out << ' ' << stage << " > /dev/null";
            if (run_cli(c.str()) != 0) {
                pass = false;
                detail = std::string("stage failed: ") + stage;
            }
        }
    }
    if (pass) {
        int compared = 0;
        for (const auto& entry : fs::directory_iterator(dir.file("out_a"))) {
            const auto name = entry.path().filename().string();
            if (name == "manifest.json") continue;  // carries stage timings
            ++compared;
            if (slurp(entry.path()) != slurp(fs::path(dir.file("out_b")) / name)) {
                pass = false;
                detail = "artifact differs: " + name;
            }
        }
        if (compared == 0) {
            pass = false;
            detail = "no artifacts produced";
        } else if (pass) {
            detail = std::to_string(compared) + " artifacts byte-identical";
        }
    }
    criterion(9, "end-to-end determinism", pass, detail);
}

// ---- criterion 10 (optional, dataset-dependent) ------------------------------

void check_baidu_recall(const char* csv_path) {
    auto table = parse_smart_dataset(csv_path);
    auto split = split_dataset(table, SplitSpec{0.5, 0.25, 0.25, 1});
    auto model = fit_knn(split.train, 5);
    auto calib =
        calibrate(model, split.calibration, NonconformityMode::margin, PValueMode::conservative);
    long knn_hit = 0, mcp_hit = 0, failed_total = 0;
    for (const auto& row : split.test.rows) {
        if (row.label != kLabelFailed) continue;
        ++failed_total;
        auto x = feature_vector(row, model.uses_bms);
        auto probs = predict_proba(model, x);
        if (probs.p[0] >= probs.p[1]) ++knn_hit;
        auto cc = confidence_credibility(p_values(calib, model, x));
        if (cc.point_label == kLabelFailed) ++mcp_hit;
    }
    bool pass = failed_total > 0 && mcp_hit >= knn_hit;
    criterion(10, "minority recall (Baidu, optional)", pass,
              "mcp=" + std::to_string(mcp_hit) + " vs knn=" + std::to_string(knn_hit) + " of " +
                  std::to_string(failed_total));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    try {
        check_selection_arithmetic();
        check_energy_arithmetic();
        check_mondrian_validity();
        check_confidence_identities();
        check_nestedness_and_monotonicity();
        check_cycle_mapping();
        check_pwfts();
        check_scheduler_contract();
        check_determinism(cli);
        if (const char* baidu = std::getenv("FLEETSCRUB_BAIDU_CSV"))
            check_baidu_recall(baidu);
        else
            skip(10, "minority recall (Baidu, optional)",
                 "set FLEETSCRUB_BAIDU_CSV to a 14-column fleet CSV to run");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 1;
    }
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
