#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fleetscrub/health.hpp"
#include "fleetscrub/pwfts.hpp"
#include "fleetscrub/smart_ingest.hpp"

namespace fleetscrub {

struct SchedulerConfig {
    double idle_threshold_pct = 50.0;
    int hour_capacity = 100;
    int scrub_duration_hours = 6;
    double power_watts = 7.0;
    std::map<ScrubCycle, int> cycle_periods = {{ScrubCycle::A_low, 90},
                                               {ScrubCycle::B_medium, 30},
                                               {ScrubCycle::C_high, 7}};

    void validate() const;
    int period_days(ScrubCycle cycle) const;
};

struct ScrubSchedule {
    struct Assignment {
        int hour = 0;  // window-relative start hour
        int disk_index = 0;
        ScrubCycle cycle = ScrubCycle::none;
        double health_score = 0.0;
    };

    std::vector<Assignment> assignments;  // priority (worst health first) order
    std::vector<int> deferred;
    std::map<int, int> next_due;  // disk -> next due day index
    bool no_idle_window = false;
    int horizon = 12;
    int window_start_hour = 0;  // absolute hour of window step 0
    std::int64_t fleet_size = 0;
};

struct SimulationReport {
    struct Notification {
        int disk_index = 0;
        int hour = 0;  // absolute hour of the interruption
        std::string message;
    };

    std::vector<int> completed;
    std::vector<Notification> interrupted;
    double energy_wh_spent = 0.0;
    double energy_wh_saved_vs_scrub_all = 0.0;
};

struct EnergyReport {
    double selected_energy_wh = 0.0;
    double scrub_all_energy_wh = 0.0;
    double saved_wh = 0.0;
};

/// Greedy worst-first assignment of due concern disks to the earliest forecast
/// hours below the idle threshold. A scrub must fit inside the window; overflow
/// is deferred with the due date kept. prior_due carries state across windows.
ScrubSchedule build_schedule(const HealthReport& report, const ForecastDistribution& forecast,
                             const SchedulerConfig& config, int today,
                             const std::map<int, int>& prior_due = {});

/// A scrub completes when every covered hour of the actual series stays below
/// the idle threshold; the first busy hour interrupts it and notifies.
SimulationReport simulate(const ScrubSchedule& schedule, const UtilizationSeries& actual,
                          const SchedulerConfig& config);

EnergyReport energy_report(const HealthReport& summary, const SchedulerConfig& config);

}  // namespace fleetscrub
