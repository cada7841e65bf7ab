#include "fleetscrub/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fleetscrub/csv.hpp"
#include "fleetscrub/errors.hpp"

namespace fs = std::filesystem;

namespace fleetscrub {

namespace {

std::string join(const std::string& dir, const std::string& rel) {
    return (fs::path(dir) / rel).string();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

const char* util_source_to_string(UtilizationSource source) {
    return source == UtilizationSource::disk_busy ? "disk_busy" : "cpu_busy";
}

UtilizationSource util_source_from_string(const std::string& s) {
    if (s == "disk_busy") return UtilizationSource::disk_busy;
    if (s == "cpu_busy") return UtilizationSource::cpu_busy;
    throw Error("unknown utilization source: " + s);
}

void require_artifact(const std::string& path, const char* needed_stage) {
    if (!fs::exists(path))
        throw Error("missing artifact " + path + "; run `fleetscrub " + needed_stage +
                    "` first");
}

}  // namespace

SplitSpec PipelineConfig::split_spec() const {
    SplitSpec spec;
    spec.proper_train_fraction = train_fraction;
    spec.calibration_fraction = calibration_fraction;
    spec.test_fraction = test_fraction;
    spec.seed = seed;
    return spec;
}

ThresholdPolicy PipelineConfig::policy() const {
    if (cycle_bands.empty()) return ThresholdPolicy::defaults(threshold);
    ThresholdPolicy custom;
    custom.threshold = threshold;
    custom.cycle_bands = cycle_bands;
    custom.validate();
    return custom;
}

std::vector<double> PipelineConfig::epsilon_grid() const {
    if (!epsilons.empty()) return epsilons;
    std::vector<double> grid;
    for (int i = 1; i <= 99; ++i) grid.push_back(static_cast<double>(i) / 100.0);
    return grid;
}

void PipelineConfig::apply_json(const nlohmann::json& j) {
    try {
        if (j.contains("dataset")) dataset_path = j.at("dataset").get<std::string>();
        if (j.contains("schema")) schema_path = j.at("schema").get<std::string>();
        if (j.contains("utilization")) utilization_path = j.at("utilization").get<std::string>();
        if (j.contains("out")) out_dir = j.at("out").get<std::string>();
        if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("k")) k = j.at("k").get<int>();
        if (j.contains("nonconformity"))
            nonconformity = nonconformity_mode_from_string(j.at("nonconformity"));
        if (j.contains("pvalue_mode")) pvalue_mode = pvalue_mode_from_string(j.at("pvalue_mode"));
        if (j.contains("mondrian")) mondrian = j.at("mondrian").get<bool>();
        if (j.contains("split")) {
            const auto& s = j.at("split");
            if (s.contains("train")) train_fraction = s.at("train").get<double>();
            if (s.contains("calibration")) calibration_fraction = s.at("calibration").get<double>();
            if (s.contains("test")) test_fraction = s.at("test").get<double>();
        }
        if (j.contains("threshold")) threshold = j.at("threshold").get<double>();
        if (j.contains("cycle_bands")) {
            cycle_bands.clear();
            for (const auto& b : j.at("cycle_bands"))
                cycle_bands.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(),
                                       scrub_cycle_from_string(b.at("cycle"))});
        }
        if (j.contains("bucket_edges"))
            bucket_edges = j.at("bucket_edges").get<std::vector<double>>();
        if (j.contains("epsilons")) epsilons = j.at("epsilons").get<std::vector<double>>();
        if (j.contains("fuzzy_sets")) fuzzy_sets = j.at("fuzzy_sets").get<int>();
        if (j.contains("horizon")) horizon = j.at("horizon").get<int>();
        if (j.contains("util_source"))
            util_source = util_source_from_string(j.at("util_source"));
        if (j.contains("today")) today = j.at("today").get<int>();
        if (j.contains("window_start_hour"))
            window_start_hour = j.at("window_start_hour").get<int>();
        if (j.contains("scheduler")) {
            const auto& s = j.at("scheduler");
            if (s.contains("idle_threshold_pct"))
                scheduler.idle_threshold_pct = s.at("idle_threshold_pct").get<double>();
            if (s.contains("hour_capacity"))
                scheduler.hour_capacity = s.at("hour_capacity").get<int>();
            if (s.contains("scrub_duration_hours"))
                scheduler.scrub_duration_hours = s.at("scrub_duration_hours").get<int>();
            if (s.contains("power_watts")) scheduler.power_watts = s.at("power_watts").get<double>();
            if (s.contains("cycle_periods")) {
                const auto& p = s.at("cycle_periods");
                for (const auto& [name, cycle] :
                     {std::pair{"A", ScrubCycle::A_low}, {"B", ScrubCycle::B_medium},
                      {"C", ScrubCycle::C_high}})
                    if (p.contains(name)) scheduler.cycle_periods[cycle] = p.at(name).get<int>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid config value: ") + e.what());
    }
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    PipelineConfig config;
    config.apply_json(read_json(path));
    return config;
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json j;
    j["dataset"] = dataset_path;
    j["schema"] = schema_path;
    j["utilization"] = utilization_path;
    j["out"] = out_dir;
    j["seed"] = seed;
    j["k"] = k;
    j["nonconformity"] = to_string(nonconformity);
    j["pvalue_mode"] = to_string(pvalue_mode);
    j["mondrian"] = mondrian;
    j["split"] = {{"train", train_fraction},
                  {"calibration", calibration_fraction},
                  {"test", test_fraction}};
    j["threshold"] = threshold;
    j["cycle_bands"] = nlohmann::json::array();
    for (const auto& b : cycle_bands)
        j["cycle_bands"].push_back(
            {{"lo", b.lo}, {"hi", b.hi}, {"cycle", fleetscrub::to_string(b.cycle)}});
    j["bucket_edges"] = bucket_edges;
    j["epsilons"] = epsilons;
    j["fuzzy_sets"] = fuzzy_sets;
    j["horizon"] = horizon;
    j["util_source"] = util_source_to_string(util_source);
    j["today"] = today;
    j["window_start_hour"] = window_start_hour;
    j["scheduler"] = {
        {"idle_threshold_pct", scheduler.idle_threshold_pct},
        {"hour_capacity", scheduler.hour_capacity},
        {"scrub_duration_hours", scheduler.scrub_duration_hours},
        {"power_watts", scheduler.power_watts},
        {"cycle_periods",
         {{"A", scheduler.cycle_periods.at(ScrubCycle::A_low)},
          {"B", scheduler.cycle_periods.at(ScrubCycle::B_medium)},
          {"C", scheduler.cycle_periods.at(ScrubCycle::C_high)}}}};
    return j;
}

std::string PipelineConfig::config_hash() const {
    const std::string dump = to_json().dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char byte : dump) {
        h ^= byte;
        h *= 1099511628211ull;
    }
    return pipeline::fnv1a_hex(h);
}

namespace pipeline {

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

std::string fnv1a_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string hex(16, '0');
    for (int i = 15; i >= 0; --i) {
        hex[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return hex;
}

StageResult run_ingest(const PipelineConfig& config) {
    if (config.dataset_path.empty()) throw Error("no dataset path configured");
    fs::create_directories(config.out_dir);

    auto schema =
        config.schema_path.empty() ? ColumnSchema::baidu() : ColumnSchema::load(config.schema_path);
    auto table = parse_smart_dataset(config.dataset_path, schema);
    save_canonical(table, join(config.out_dir, "samples.csv"));

    StageResult result;
    result.artifacts.push_back("samples.csv");

    nlohmann::json summary;
    summary["rows"] = table.rows.size();
    summary["disk_count"] = table.disk_count();
    summary["failed_disk_count"] = table.failed_disk_count();
    summary["has_bms"] = table.has_full_bms();

    if (!config.utilization_path.empty()) {
        auto series = parse_utilization_log(config.utilization_path, config.util_source);
        save_utilization(series, join(config.out_dir, "utilization.csv"));
        result.artifacts.push_back("utilization.csv");
        summary["utilization_hours"] = series.samples.size();
        summary["utilization_source"] = util_source_to_string(series.source);
    }
    write_json(join(config.out_dir, "ingest_summary.json"), summary);
    result.artifacts.push_back("ingest_summary.json");
    return result;
}

namespace {

// Scoring row per disk: most recent by timestamp when stamps exist,
// otherwise the last row in file order.
std::map<int, DiskSample> representative_rows(const DiskSampleTable& table) {
    std::map<int, DiskSample> chosen;
    for (const auto& row : table.rows) {
        auto it = chosen.find(row.disk_index);
        if (it == chosen.end()) {
            chosen.emplace(row.disk_index, row);
            continue;
        }
        const auto& cur = it->second;
        bool replace;
        if (row.timestamp_hour && cur.timestamp_hour)
            replace = *row.timestamp_hour >= *cur.timestamp_hour;
        else if (row.timestamp_hour || cur.timestamp_hour)
            replace = row.timestamp_hour.has_value();
        else
            replace = true;  // later file order wins
        if (replace) it->second = row;
    }
    return chosen;
}

void write_confusion_csv(const std::string& path, const std::array<std::array<long, 2>, 2>& knn,
                         const std::array<std::array<long, 2>, 2>& mcp) {
    std::ostringstream out;
    out << "predictor,actual,predicted_failed,predicted_functional\n";
    const char* names[2] = {"failed", "functional"};
    for (int a = 0; a < 2; ++a)
        out << "knn," << names[a] << ',' << knn[a][0] << ',' << knn[a][1] << '\n';
    for (int a = 0; a < 2; ++a)
        out << "mcp," << names[a] << ',' << mcp[a][0] << ',' << mcp[a][1] << '\n';
    write_text(path, out.str());
}

void write_health_csv(const std::string& path, const std::vector<DiskHealth>& healths) {
    std::ostringstream out;
    out << "disk_index,point_label,health_score,credibility,disposition,cycle\n";
    for (const auto& h : healths)
        out << h.disk_index << ',' << h.point_label << ',' << csv::format_double(h.health_score)
            << ',' << csv::format_double(h.credibility) << ',' << to_string(h.disposition())
            << ',' << to_string(h.cycle) << '\n';
    write_text(path, out.str());
}

std::vector<DiskHealth> load_health_csv(const std::string& path) {
    auto lines = csv::read_lines(path);
    std::vector<DiskHealth> healths;
    for (std::size_t i = 1; i < lines.size(); ++i) {  // skip header
        if (lines[i].find_first_not_of(" \t\r\n") == std::string::npos) continue;
        auto fields = csv::split_fields(lines[i]);
        if (fields.size() != 6) throw MalformedRow(i + 1, "expected 6 fields in health CSV");
        DiskHealth h;
        h.disk_index = static_cast<int>(csv::parse_int(fields[0]).value_or(-1));
        h.point_label = static_cast<int>(csv::parse_int(fields[1]).value_or(-1));
        auto score = csv::parse_double(fields[2]);
        auto cred = csv::parse_double(fields[3]);
        if (h.disk_index < 1 || (h.point_label != 0 && h.point_label != 1) || !score || !cred)
            throw MalformedRow(i + 1, "invalid health CSV row");
        h.health_score = *score;
        h.credibility = *cred;
        h.concern = fields[4] == "concern";
        h.cycle = scrub_cycle_from_string(fields[5]);
        healths.push_back(h);
    }
    if (healths.empty()) throw EmptyFile(path);
    return healths;
}

nlohmann::json health_summary_json(const HealthReport& report, double threshold) {
    nlohmann::json j;
    j["fleet_size"] = report.fleet_size();
    j["selected_count"] = report.selected_count;
    j["skipped_count"] = report.skipped_count;
    j["replacement_count"] = report.replacement_count;
    j["selected_fraction_pct"] = 100.0 * static_cast<double>(report.selected_count) /
                                 static_cast<double>(report.fleet_size());
    j["threshold"] = threshold;
    j["buckets"] = {{"edges", report.buckets.edges},
                    {"counts", report.buckets.counts},
                    {"below_lowest", report.buckets.below_lowest},
                    {"above_highest", report.buckets.above_highest}};
    return j;
}

}  // namespace

StageResult run_score(const PipelineConfig& config, bool reuse_model) {
    const auto samples_path = join(config.out_dir, "samples.csv");
    require_artifact(samples_path, "ingest");
    auto table = load_canonical(samples_path);
    auto split = split_dataset(table, config.split_spec());

    const auto model_path = join(config.out_dir, "model.json");
    const auto calibration_path = join(config.out_dir, "calibration.json");
    KnnModel model;
    CalibrationTable calibration;
    if (reuse_model && fs::exists(model_path) && fs::exists(calibration_path)) {
        model = load_model(model_path);
        calibration = load_calibration(calibration_path);
    } else {
        model = fit_knn(split.train, config.k);
        calibration = calibrate(model, split.calibration, config.nonconformity,
                                config.pvalue_mode);
        save_model(model, model_path);
        save_calibration(calibration, calibration_path);
    }

    // Per-sample p-values, point predictions, confusion counts on the test split.
    std::vector<PValueVector> pvals;
    std::vector<int> labels;
    pvals.reserve(split.test.rows.size());
    std::array<std::array<long, 2>, 2> knn_confusion{};
    std::array<std::array<long, 2>, 2> mcp_confusion{};
    std::ostringstream pvalue_csv;
    pvalue_csv << "row,disk_index,p_failed,p_functional,confidence,credibility,point_label\n";
    for (std::size_t i = 0; i < split.test.rows.size(); ++i) {
        const auto& row = split.test.rows[i];
        auto x = feature_vector(row, model.uses_bms);
        auto probs = predict_proba(model, x);
        auto pv = p_values(calibration, model, x, config.mondrian);
        auto cc = confidence_credibility(pv);
        pvals.push_back(pv);
        labels.push_back(row.label);
        int knn_label = probs.p[0] >= probs.p[1] ? 0 : 1;
        knn_confusion[row.label][knn_label] += 1;
        mcp_confusion[row.label][cc.point_label] += 1;
        pvalue_csv << i << ',' << row.disk_index << ',' << csv::format_double(pv.p[0]) << ','
                   << csv::format_double(pv.p[1]) << ',' << csv::format_double(cc.confidence)
                   << ',' << csv::format_double(cc.credibility) << ',' << cc.point_label << '\n';
    }
    write_text(join(config.out_dir, "pvalues.csv"), pvalue_csv.str());
    write_confusion_csv(join(config.out_dir, "confusion.csv"), knn_confusion, mcp_confusion);

    // Disk-level health from each disk's representative sample.
    const auto policy = config.policy();
    std::vector<DiskHealth> healths;
    for (const auto& [disk, row] : representative_rows(split.test)) {
        auto pv = p_values(calibration, model, feature_vector(row, model.uses_bms),
                           config.mondrian);
        healths.push_back(score_disk(disk, pv, policy));
    }
    auto report = selection_summary(healths, config.bucket_edges);
    write_health_csv(join(config.out_dir, "disk_health.csv"), report.disks);
    write_json(join(config.out_dir, "health_summary.json"),
               health_summary_json(report, config.threshold));

    auto coverage = coverage_from_pvalues(pvals, labels, config.epsilon_grid());
    std::ostringstream coverage_csv;
    coverage_csv << "epsilon,effective_coverage,average_set_size,error_failed,error_functional\n";
    for (const auto& row : coverage.rows)
        coverage_csv << csv::format_double(row.epsilon) << ','
                     << csv::format_double(row.effective_coverage) << ','
                     << csv::format_double(row.average_set_size) << ','
                     << csv::format_double(row.class_error[0]) << ','
                     << csv::format_double(row.class_error[1]) << '\n';
    write_text(join(config.out_dir, "coverage.csv"), coverage_csv.str());

    return StageResult{{"model.json", "calibration.json", "pvalues.csv", "confusion.csv",
                        "disk_health.csv", "health_summary.json", "coverage.csv"}};
}

StageResult run_forecast(const PipelineConfig& config, const std::string& series_path) {
    std::string path = series_path;
    if (path.empty()) {
        path = join(config.out_dir, "utilization.csv");
        require_artifact(path, "ingest");
    }
    auto series = parse_utilization_log(path, config.util_source);
    auto model = fit_pwfts(series, config.fuzzy_sets);
    auto dist = forecast(model, series.samples.back().utilization_pct, config.horizon);

    std::ostringstream out;
    out << "step,point_forecast";
    for (std::size_t j = 0; j < dist.partition.size(); ++j) out << ",p_" << j;
    out << '\n';
    for (int step = 0; step < dist.horizon(); ++step) {
        out << step << ',' << csv::format_double(dist.points[static_cast<std::size_t>(step)]);
        for (double p : dist.probs[static_cast<std::size_t>(step)])
            out << ',' << csv::format_double(p);
        out << '\n';
    }
    write_text(join(config.out_dir, "forecast.csv"), out.str());

    std::ostringstream partition_csv;
    partition_csv << "set_index,center\n";
    for (std::size_t j = 0; j < dist.partition.size(); ++j)
        partition_csv << j << ',' << csv::format_double(dist.partition.centers[j]) << '\n';
    write_text(join(config.out_dir, "forecast_partition.csv"), partition_csv.str());

    return StageResult{{"forecast.csv", "forecast_partition.csv"}};
}

namespace {

ForecastDistribution load_forecast(const std::string& forecast_path,
                                   const std::string& partition_path) {
    ForecastDistribution dist;
    auto partition_lines = csv::read_lines(partition_path);
    for (std::size_t i = 1; i < partition_lines.size(); ++i) {
        if (partition_lines[i].find_first_not_of(" \t\r\n") == std::string::npos) continue;
        auto fields = csv::split_fields(partition_lines[i]);
        auto center = fields.size() == 2 ? csv::parse_double(fields[1]) : std::nullopt;
        if (!center) throw MalformedRow(i + 1, "invalid partition row");
        dist.partition.centers.push_back(*center);
    }
    if (dist.partition.centers.empty()) throw EmptyFile(partition_path);
    dist.partition.universe_min = dist.partition.centers.front();
    dist.partition.universe_max = dist.partition.centers.back();

    auto lines = csv::read_lines(forecast_path);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r\n") == std::string::npos) continue;
        auto fields = csv::split_fields(lines[i]);
        if (fields.size() != dist.partition.size() + 2)
            throw MalformedRow(i + 1, "forecast row width does not match the partition");
        auto point = csv::parse_double(fields[1]);
        if (!point) throw MalformedRow(i + 1, "non-numeric point forecast");
        dist.points.push_back(*point);
        std::vector<double> probs;
        for (std::size_t f = 2; f < fields.size(); ++f) {
            auto p = csv::parse_double(fields[f]);
            if (!p) throw MalformedRow(i + 1, "non-numeric probability");
            probs.push_back(*p);
        }
        dist.probs.push_back(std::move(probs));
    }
    if (dist.points.empty()) throw EmptyFile(forecast_path);
    return dist;
}

// Point forecasts only; tolerates a different fuzzy-set count than the
// primary forecast (used for the second, e.g. CPU-busy, series).
std::vector<double> load_forecast_points(const std::string& path) {
    auto lines = csv::read_lines(path);
    std::vector<double> points;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r\n") == std::string::npos) continue;
        auto fields = csv::split_fields(lines[i]);
        auto point = fields.size() >= 2 ? csv::parse_double(fields[1]) : std::nullopt;
        if (!point) throw MalformedRow(i + 1, "non-numeric point forecast");
        points.push_back(*point);
    }
    if (points.empty()) throw EmptyFile(path);
    return points;
}

}  // namespace

ScheduleOutcome run_schedule(const PipelineConfig& config, bool dry_run,
                             const std::string& actual_path,
                             const std::string& second_forecast_path) {
    const auto health_path = join(config.out_dir, "disk_health.csv");
    require_artifact(health_path, "score");
    const auto forecast_path = join(config.out_dir, "forecast.csv");
    require_artifact(forecast_path, "forecast");

    auto healths = load_health_csv(health_path);
    auto report = selection_summary(healths, config.bucket_edges);
    auto dist = load_forecast(forecast_path, join(config.out_dir, "forecast_partition.csv"));
    if (!second_forecast_path.empty()) {
        // Combined CPU/disk scheduling: take the busier of the two point forecasts.
        auto second = load_forecast_points(second_forecast_path);
        if (second.size() != dist.points.size())
            throw Error("second forecast horizon does not match");
        for (std::size_t h = 0; h < dist.points.size(); ++h)
            dist.points[h] = std::max(dist.points[h], second[h]);
    }
    if (config.horizon > 0 && static_cast<std::size_t>(config.horizon) < dist.points.size()) {
        dist.points.resize(static_cast<std::size_t>(config.horizon));
        dist.probs.resize(static_cast<std::size_t>(config.horizon));
    }

    auto schedule = build_schedule(report, dist, config.scheduler, config.today);
    schedule.window_start_hour = config.window_start_hour;

    std::ostringstream schedule_csv;
    schedule_csv << "hour,disk_index,cycle,health_score\n";
    for (const auto& a : schedule.assignments)
        schedule_csv << a.hour << ',' << a.disk_index << ',' << to_string(a.cycle) << ','
                     << csv::format_double(a.health_score) << '\n';
    write_text(join(config.out_dir, "schedule.csv"), schedule_csv.str());

    nlohmann::json schedule_summary;
    schedule_summary["assignments"] = schedule.assignments.size();
    schedule_summary["deferred"] = schedule.deferred;
    schedule_summary["no_idle_window"] = schedule.no_idle_window;
    schedule_summary["today"] = config.today;
    schedule_summary["horizon"] = schedule.horizon;
    nlohmann::json due;
    for (const auto& [disk, day] : schedule.next_due) due[std::to_string(disk)] = day;
    schedule_summary["next_due"] = due;
    write_json(join(config.out_dir, "schedule_summary.json"), schedule_summary);

    auto energy = energy_report(report, config.scheduler);
    nlohmann::json energy_json;
    energy_json["selected_count"] = report.selected_count;
    energy_json["fleet_size"] = report.fleet_size();
    energy_json["power_watts"] = config.scheduler.power_watts;
    energy_json["scrub_duration_hours"] = config.scheduler.scrub_duration_hours;
    energy_json["selected_energy_wh"] = energy.selected_energy_wh;
    energy_json["scrub_all_energy_wh"] = energy.scrub_all_energy_wh;
    energy_json["saved_wh"] = energy.saved_wh;
    write_json(join(config.out_dir, "energy.json"), energy_json);

    ScheduleOutcome outcome;
    outcome.no_idle_window = schedule.no_idle_window;
    outcome.result.artifacts = {"schedule.csv", "schedule_summary.json", "energy.json"};

    if (!dry_run) {
        std::string actuals = actual_path;
        if (actuals.empty()) {
            actuals = join(config.out_dir, "utilization.csv");
            require_artifact(actuals, "ingest");
        }
        auto actual_series = parse_utilization_log(actuals, config.util_source);
        auto sim = simulate(schedule, actual_series, config.scheduler);
        nlohmann::json sim_json;
        sim_json["completed"] = sim.completed;
        sim_json["interrupted"] = nlohmann::json::array();
        for (const auto& n : sim.interrupted)
            sim_json["interrupted"].push_back(
                {{"disk_index", n.disk_index}, {"hour", n.hour}, {"message", n.message}});
        sim_json["energy_wh_spent"] = sim.energy_wh_spent;
        sim_json["energy_wh_saved_vs_scrub_all"] = sim.energy_wh_saved_vs_scrub_all;
        write_json(join(config.out_dir, "simulation.json"), sim_json);
        outcome.result.artifacts.push_back("simulation.json");
    }
    return outcome;
}

std::string run_report(const PipelineConfig& config) {
    nlohmann::json report;
    std::ostringstream text;
    text << "fleetscrub run report (" << config.out_dir << ")\n";

    const auto health_path = join(config.out_dir, "health_summary.json");
    require_artifact(health_path, "score");
    auto health = read_json(health_path);
    report["health"] = health;
    text << "  fleet: " << health.at("fleet_size").get<std::int64_t>() << " disks, selected "
         << health.at("selected_count").get<std::int64_t>() << " ("
         << health.at("selected_fraction_pct").get<double>() << "%), skipped "
         << health.at("skipped_count").get<std::int64_t>() << ", replacement "
         << health.at("replacement_count").get<std::int64_t>() << '\n';

    const auto energy_path = join(config.out_dir, "energy.json");
    if (fs::exists(energy_path)) {
        auto energy = read_json(energy_path);
        report["energy"] = energy;
        text << "  energy: selected " << energy.at("selected_energy_wh").get<double>()
             << " Wh vs scrub-all " << energy.at("scrub_all_energy_wh").get<double>()
             << " Wh -> saved " << energy.at("saved_wh").get<double>() << " Wh\n";
    }
    const auto schedule_path = join(config.out_dir, "schedule_summary.json");
    if (fs::exists(schedule_path)) {
        auto schedule = read_json(schedule_path);
        report["schedule"] = schedule;
        text << "  schedule: " << schedule.at("assignments").get<std::int64_t>()
             << " assignments, " << schedule.at("deferred").size() << " deferred"
             << (schedule.at("no_idle_window").get<bool>() ? " [no idle window]" : "") << '\n';
    }
    const auto sim_path = join(config.out_dir, "simulation.json");
    if (fs::exists(sim_path)) {
        auto sim = read_json(sim_path);
        report["simulation"] = sim;
        text << "  simulation: " << sim.at("completed").size() << " completed, "
             << sim.at("interrupted").size() << " interrupted, spent "
             << sim.at("energy_wh_spent").get<double>() << " Wh\n";
    }
    write_json(join(config.out_dir, "report.json"), report);
    return text.str();
}

void update_manifest(const PipelineConfig& config, const std::string& stage,
                     const StageResult& result, double elapsed_ms) {
    const auto manifest_path = join(config.out_dir, "manifest.json");
    nlohmann::json manifest;
    if (fs::exists(manifest_path)) {
        try {
            manifest = read_json(manifest_path);
        } catch (const Error&) {
            manifest = nlohmann::json::object();
        }
    }
    manifest["tool"] = "fleetscrub";
    manifest["version"] = kToolVersion;
    nlohmann::json artifacts;
    for (const auto& rel : result.artifacts) {
        const auto path = join(config.out_dir, rel);
        artifacts[rel] = {{"fnv1a", fnv1a_hex(fnv1a_file(path))},
                          {"bytes", fs::file_size(path)}};
    }
    manifest["stages"][stage] = {{"config_hash", config.config_hash()},
                                 {"timing_ms", elapsed_ms},
                                 {"artifacts", artifacts}};
    write_json(manifest_path, manifest);
}

}  // namespace pipeline

}  // namespace fleetscrub
