#include "fleetscrub/scheduler.hpp"

#include <algorithm>
#include <unordered_map>

#include "fleetscrub/csv.hpp"
#include "fleetscrub/errors.hpp"

namespace fleetscrub {

void SchedulerConfig::validate() const {
    if (idle_threshold_pct <= 0.0 || idle_threshold_pct >= 100.0)
        throw Error("idle threshold must lie in (0,100)");
    if (hour_capacity < 1) throw Error("hour capacity must be >= 1");
    if (scrub_duration_hours < 1) throw Error("scrub duration must be >= 1");
    if (power_watts <= 0.0) throw Error("power draw must be positive");
    for (auto cycle : {ScrubCycle::A_low, ScrubCycle::B_medium, ScrubCycle::C_high}) {
        auto it = cycle_periods.find(cycle);
        if (it == cycle_periods.end() || it->second < 1)
            throw Error("cycle periods must be positive for cycles A, B, C");
    }
    if (!(cycle_periods.at(ScrubCycle::A_low) > cycle_periods.at(ScrubCycle::B_medium) &&
          cycle_periods.at(ScrubCycle::B_medium) > cycle_periods.at(ScrubCycle::C_high)))
        throw Error("cycle periods must satisfy A > B > C");
}

int SchedulerConfig::period_days(ScrubCycle cycle) const {
    auto it = cycle_periods.find(cycle);
    if (it == cycle_periods.end()) throw Error("no period configured for this cycle");
    return it->second;
}

ScrubSchedule build_schedule(const HealthReport& report, const ForecastDistribution& forecast,
                             const SchedulerConfig& config, int today,
                             const std::map<int, int>& prior_due) {
    config.validate();
    ScrubSchedule schedule;
    schedule.horizon = forecast.horizon();
    schedule.fleet_size = report.fleet_size();
    schedule.next_due = prior_due;

    std::vector<int> idle_hours;
    bool any_idle = false;
    for (int h = 0; h < schedule.horizon; ++h) {
        if (forecast.points[static_cast<std::size_t>(h)] < config.idle_threshold_pct) {
            any_idle = true;
            if (h + config.scrub_duration_hours <= schedule.horizon) idle_hours.push_back(h);
        }
    }
    schedule.no_idle_window = !any_idle;

    struct Candidate {
        const DiskHealth* disk;
        int due_day;
        bool overdue;
    };
    std::vector<Candidate> due;
    for (const auto& disk : report.ranked_concern) {
        auto it = prior_due.find(disk.disk_index);
        int due_day = it == prior_due.end() ? today : it->second;
        if (due_day > today) continue;
        due.push_back({&disk, due_day, due_day < today});
    }
    std::sort(due.begin(), due.end(), [](const Candidate& a, const Candidate& b) {
        if (a.disk->health_score != b.disk->health_score)
            return a.disk->health_score < b.disk->health_score;
        if (a.overdue != b.overdue) return a.overdue;
        return a.disk->disk_index < b.disk->disk_index;
    });

    std::vector<int> load(static_cast<std::size_t>(schedule.horizon), 0);
    for (const auto& candidate : due) {
        int assigned_hour = -1;
        for (int h : idle_hours) {
            if (load[static_cast<std::size_t>(h)] < config.hour_capacity) {
                assigned_hour = h;
                break;
            }
        }
        const auto& disk = *candidate.disk;
        if (assigned_hour < 0) {
            schedule.deferred.push_back(disk.disk_index);
            schedule.next_due[disk.disk_index] = candidate.due_day;  // stays due
            continue;
        }
        ++load[static_cast<std::size_t>(assigned_hour)];
        schedule.assignments.push_back(
            {assigned_hour, disk.disk_index, disk.cycle, disk.health_score});
        schedule.next_due[disk.disk_index] = today + config.period_days(disk.cycle);
    }
    return schedule;
}

SimulationReport simulate(const ScrubSchedule& schedule, const UtilizationSeries& actual,
                          const SchedulerConfig& config) {
    config.validate();
    std::unordered_map<std::int64_t, double> pct_at;
    for (const auto& s : actual.samples) pct_at.emplace(s.hour_index, s.utilization_pct);

    SimulationReport report;
    for (const auto& a : schedule.assignments) {
        const std::int64_t start = schedule.window_start_hour + a.hour;
        bool interrupted = false;
        for (int t = 0; t < config.scrub_duration_hours && !interrupted; ++t) {
            auto it = pct_at.find(start + t);
            if (it == pct_at.end()) throw MissingActuals(start + t);
            if (it->second >= config.idle_threshold_pct) {
                report.interrupted.push_back(
                    {a.disk_index, static_cast<int>(start + t),
                     "scrub of disk " + std::to_string(a.disk_index) + " interrupted at hour " +
                         std::to_string(start + t) + " (utilization " +
                         csv::format_double(it->second) + "%); administrator notified"});
                interrupted = true;
            }
        }
        if (!interrupted) report.completed.push_back(a.disk_index);
    }
    const double per_disk_wh =
        config.power_watts * static_cast<double>(config.scrub_duration_hours);
    report.energy_wh_spent = static_cast<double>(report.completed.size()) * per_disk_wh;
    const auto not_scrubbed =
        std::max<std::int64_t>(0, schedule.fleet_size -
                                      static_cast<std::int64_t>(report.completed.size()));
    report.energy_wh_saved_vs_scrub_all = static_cast<double>(not_scrubbed) * per_disk_wh;
    return report;
}

EnergyReport energy_report(const HealthReport& summary, const SchedulerConfig& config) {
    config.validate();
    const double per_disk_wh =
        config.power_watts * static_cast<double>(config.scrub_duration_hours);
    EnergyReport report;
    report.selected_energy_wh = static_cast<double>(summary.selected_count) * per_disk_wh;
    report.scrub_all_energy_wh = static_cast<double>(summary.fleet_size()) * per_disk_wh;
    report.saved_wh = report.scrub_all_energy_wh - report.selected_energy_wh;
    return report;
}

}  // namespace fleetscrub
