#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fleetscrub/smart_ingest.hpp"

namespace fleetscrub {

/// Per-class probability estimates; index 0 = failed, 1 = functional.
struct ClassProbabilities {
    std::array<double, 2> p{};
};

/// Z-score scaler fitted on the proper training set only. Constant features
/// get a unit standard deviation substitute and are flagged.
struct FeatureScaler {
    std::vector<double> means;
    std::vector<double> std_devs;
    std::vector<std::uint8_t> constant;

    std::vector<double> apply(std::span<const double> x) const;
    static FeatureScaler fit(const std::vector<double>& data, std::size_t dim);
};

/// k-nearest-neighbor classifier on z-scored features, Euclidean distance,
/// unweighted neighbor vote. Immutable after fit.
struct KnnModel {
    int k = 5;
    std::size_t dim = 0;
    FeatureScaler scaler;
    std::vector<double> points;  // scaled, row-major n x dim
    std::vector<int> labels;
    bool uses_bms = false;

    std::size_t size() const { return labels.size(); }
};

enum class NonconformityMode { inverse_probability, margin };

KnnModel fit_knn(const DiskSampleTable& train, int k = 5);

/// P(y|x) = share of label-y points among the k nearest; distance ties broken
/// by lower training-row index.
ClassProbabilities predict_proba(const KnnModel& model, std::span<const double> x);

/// inverse_probability: 1 - P(y|x); margin: max_{y' != y} P(y'|x) - P(y|x).
double nonconformity(const ClassProbabilities& probs, int hypothesized_label,
                     NonconformityMode mode);

void save_model(const KnnModel& model, const std::string& path);
KnnModel load_model(const std::string& path);

}  // namespace fleetscrub
