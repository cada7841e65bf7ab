#pragma once

#include <cstdint>
#include <vector>

#include "fleetscrub/smart_ingest.hpp"

namespace fleetscrub {

/// Evenly spaced triangular fuzzy sets over the universe of discourse; the two
/// edge sets are shoulders so memberships sum to 1 everywhere.
struct FuzzyPartition {
    double universe_min = 0.0;
    double universe_max = 100.0;
    std::vector<double> centers;

    std::size_t size() const { return centers.size(); }
    double set_width() const;
    double membership(std::size_t set, double u) const;
    std::vector<double> memberships(double u) const;

    static FuzzyPartition grid(double lo, double hi, int set_count);
};

/// First-order probabilistic weighted fuzzy time series model: transition
/// weight (i,j) accumulates the co-membership of consecutive observations.
struct PwftsModel {
    FuzzyPartition partition;
    std::vector<std::vector<double>> transition_weights;
    std::vector<double> row_totals;

    bool fitted() const { return !partition.centers.empty() && !transition_weights.empty(); }
    bool unseen_state(std::size_t set) const { return row_totals[set] == 0.0; }
};

struct ForecastDistribution {
    FuzzyPartition partition;
    std::vector<std::vector<double>> probs;  // one probability vector per step
    std::vector<double> points;              // probability-weighted set centers, clamped

    int horizon() const { return static_cast<int>(probs.size()); }
};

/// Universe is padded 10% beyond the observed range, clipped to [0, 100].
PwftsModel fit_pwfts(const UtilizationSeries& series, int set_count = 20);

ForecastDistribution forecast(const PwftsModel& model, double last_value, int horizon = 12);

std::vector<double> point_forecasts(const ForecastDistribution& dist);

}  // namespace fleetscrub
