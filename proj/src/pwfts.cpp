#include "fleetscrub/pwfts.hpp"

#include <algorithm>
#include <cmath>

#include "fleetscrub/errors.hpp"

namespace fleetscrub {

double FuzzyPartition::set_width() const {
    if (centers.size() < 2) return universe_max - universe_min;
    return centers[1] - centers[0];
}

double FuzzyPartition::membership(std::size_t set, double u) const {
    const std::size_t m = centers.size();
    const double c = centers[set];
    if (set == 0) {
        if (u <= c) return 1.0;
        double right = centers[1];
        return u < right ? (right - u) / (right - c) : 0.0;
    }
    if (set == m - 1) {
        if (u >= c) return 1.0;
        double left = centers[m - 2];
        return u > left ? (u - left) / (c - left) : 0.0;
    }
    double left = centers[set - 1];
    double right = centers[set + 1];
    if (u > left && u <= c) return (u - left) / (c - left);
    if (u > c && u < right) return (right - u) / (right - c);
    return 0.0;
}

std::vector<double> FuzzyPartition::memberships(double u) const {
    std::vector<double> mu(centers.size(), 0.0);
    for (std::size_t i = 0; i < centers.size(); ++i) mu[i] = membership(i, u);
    return mu;
}

FuzzyPartition FuzzyPartition::grid(double lo, double hi, int set_count) {
    if (set_count < 3) throw Error("fuzzy partition needs at least 3 sets");
    if (!(hi > lo)) throw Error("universe must have positive width");
    FuzzyPartition partition;
    partition.universe_min = lo;
    partition.universe_max = hi;
    partition.centers.resize(static_cast<std::size_t>(set_count));
    const double step = (hi - lo) / static_cast<double>(set_count - 1);
    for (int i = 0; i < set_count; ++i)
        partition.centers[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
    return partition;
}

PwftsModel fit_pwfts(const UtilizationSeries& series, int set_count) {
    if (series.samples.size() < 2) throw SeriesTooShort(series.samples.size());

    double lo_obs = series.samples.front().utilization_pct;
    double hi_obs = lo_obs;
    for (const auto& s : series.samples) {
        lo_obs = std::min(lo_obs, s.utilization_pct);
        hi_obs = std::max(hi_obs, s.utilization_pct);
    }
    double pad = 0.1 * (hi_obs - lo_obs);
    if (pad <= 0.0) pad = 1.0;
    const double lo = std::max(0.0, lo_obs - pad);
    const double hi = std::min(100.0, hi_obs + pad);

    PwftsModel model;
    model.partition = FuzzyPartition::grid(lo, hi, set_count);
    const auto m = model.partition.size();
    model.transition_weights.assign(m, std::vector<double>(m, 0.0));
    model.row_totals.assign(m, 0.0);

    auto mu_prev = model.partition.memberships(series.samples[0].utilization_pct);
    for (std::size_t t = 1; t < series.samples.size(); ++t) {
        auto mu_next = model.partition.memberships(series.samples[t].utilization_pct);
        for (std::size_t i = 0; i < m; ++i) {
            if (mu_prev[i] == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (mu_next[j] == 0.0) continue;
                double w = mu_prev[i] * mu_next[j];
                model.transition_weights[i][j] += w;
                model.row_totals[i] += w;
            }
        }
        mu_prev = std::move(mu_next);
    }
    return model;
}

ForecastDistribution forecast(const PwftsModel& model, double last_value, int horizon) {
    if (!model.fitted()) throw UnfittedModel();
    if (horizon < 1) throw Error("forecast horizon must be >= 1");
    const auto m = model.partition.size();

    // Row-normalized transition matrix; unseen states fall back to uniform.
    std::vector<std::vector<double>> transition(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        if (model.unseen_state(i)) {
            for (std::size_t j = 0; j < m; ++j)
                transition[i][j] = 1.0 / static_cast<double>(m);
        } else {
            for (std::size_t j = 0; j < m; ++j)
                transition[i][j] = model.transition_weights[i][j] / model.row_totals[i];
        }
    }

    ForecastDistribution dist;
    dist.partition = model.partition;
    dist.probs.reserve(static_cast<std::size_t>(horizon));

    std::vector<double> state = model.partition.memberships(last_value);
    for (int step = 0; step < horizon; ++step) {
        std::vector<double> next(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (state[i] == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) next[j] += state[i] * transition[i][j];
        }
        dist.probs.push_back(next);
        state = std::move(next);
    }
    dist.points = point_forecasts(dist);
    return dist;
}

std::vector<double> point_forecasts(const ForecastDistribution& dist) {
    std::vector<double> points;
    points.reserve(dist.probs.size());
    for (const auto& step : dist.probs) {
        double value = 0.0;
        for (std::size_t j = 0; j < step.size(); ++j) value += step[j] * dist.partition.centers[j];
        points.push_back(
            std::clamp(value, dist.partition.universe_min, dist.partition.universe_max));
    }
    return points;
}

}  // namespace fleetscrub
