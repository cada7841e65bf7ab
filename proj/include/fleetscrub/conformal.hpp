#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fleetscrub/knn.hpp"
#include "fleetscrub/smart_ingest.hpp"

namespace fleetscrub {

/// `paper` divides the tail count by n; `conservative` applies the standard +1
/// correction so finite-sample validity is provable.
enum class PValueMode { paper, conservative };

struct CalibrationTable {
    std::array<std::vector<double>, 2> scores_by_class;  // sorted ascending
    std::vector<double> pooled_scores;                   // sorted ascending
    std::size_t q = 0;
    NonconformityMode mode = NonconformityMode::margin;
    PValueMode pvalue_mode = PValueMode::conservative;
};

struct PValueVector {
    std::array<double, 2> p{};
    bool mondrian = true;
};

struct PredictionSet {
    std::array<bool, 2> contains{};
    double epsilon = 0.0;

    int size() const { return (contains[0] ? 1 : 0) + (contains[1] ? 1 : 0); }
};

struct ConfidenceCredibility {
    double confidence = 0.0;   // 1 - second-largest p-value
    double credibility = 0.0;  // largest p-value
    int point_label = 0;       // argmax p, ties toward class 0
};

struct CoverageRow {
    double epsilon = 0.0;
    double effective_coverage = 0.0;
    double average_set_size = 0.0;
    std::array<double, 2> class_error{};  // fraction of class-C objects with C outside the set
};

struct CoverageReport {
    std::vector<CoverageRow> rows;
};

/// Scores every calibration example with its true label as the hypothesized one.
CalibrationTable calibrate(const KnnModel& model, const DiskSampleTable& calibration,
                           NonconformityMode mode, PValueMode pvalue_mode);

/// Share of calibration scores at least as large as alpha_test; the list must
/// be sorted ascending.
double p_value_from_scores(const std::vector<double>& sorted_scores, double alpha_test,
                           PValueMode mode);

/// Class-conditional (Mondrian) p-values by default; pooled over all
/// calibration scores when mondrian is false.
PValueVector p_values(const CalibrationTable& table, const KnnModel& model,
                      std::span<const double> x, bool mondrian = true);

PredictionSet prediction_set(const PValueVector& pvals, double epsilon);

ConfidenceCredibility confidence_credibility(const PValueVector& pvals);

CoverageReport evaluate_coverage(const CalibrationTable& table, const KnnModel& model,
                                 const DiskSampleTable& test,
                                 const std::vector<double>& epsilons, bool mondrian = true);

/// Aggregation core over precomputed p-values (one entry per test object).
CoverageReport coverage_from_pvalues(const std::vector<PValueVector>& pvals,
                                     const std::vector<int>& labels,
                                     const std::vector<double>& epsilons);

void save_calibration(const CalibrationTable& table, const std::string& path);
CalibrationTable load_calibration(const std::string& path);

const char* to_string(NonconformityMode mode);
const char* to_string(PValueMode mode);
NonconformityMode nonconformity_mode_from_string(const std::string& s);
PValueMode pvalue_mode_from_string(const std::string& s);

}  // namespace fleetscrub
