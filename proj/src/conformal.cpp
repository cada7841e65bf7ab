#include "fleetscrub/conformal.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fleetscrub/errors.hpp"

namespace fleetscrub {

CalibrationTable calibrate(const KnnModel& model, const DiskSampleTable& calibration,
                           NonconformityMode mode, PValueMode pvalue_mode) {
    if (calibration.rows.empty()) throw EmptyCalibration();
    CalibrationTable table;
    table.mode = mode;
    table.pvalue_mode = pvalue_mode;
    for (const auto& r : calibration.rows) {
        auto x = feature_vector(r, model.uses_bms);
        auto probs = predict_proba(model, x);
        double alpha = nonconformity(probs, r.label, mode);
        table.scores_by_class[r.label].push_back(alpha);
        table.pooled_scores.push_back(alpha);
    }
    for (int c = 0; c < 2; ++c) {
        if (table.scores_by_class[c].empty()) throw ClassAbsent(c);
        std::sort(table.scores_by_class[c].begin(), table.scores_by_class[c].end());
    }
    std::sort(table.pooled_scores.begin(), table.pooled_scores.end());
    table.q = table.pooled_scores.size();
    return table;
}

double p_value_from_scores(const std::vector<double>& sorted_scores, double alpha_test,
                           PValueMode mode) {
    auto it = std::lower_bound(sorted_scores.begin(), sorted_scores.end(), alpha_test);
    auto at_least = static_cast<double>(sorted_scores.end() - it);
    auto n = static_cast<double>(sorted_scores.size());
    if (mode == PValueMode::paper) return at_least / n;
    return (at_least + 1.0) / (n + 1.0);
}

PValueVector p_values(const CalibrationTable& table, const KnnModel& model,
                      std::span<const double> x, bool mondrian) {
    auto probs = predict_proba(model, x);
    PValueVector pvals;
    pvals.mondrian = mondrian;
    for (int c = 0; c < 2; ++c) {
        double alpha = nonconformity(probs, c, table.mode);
        const auto& scores = mondrian ? table.scores_by_class[c] : table.pooled_scores;
        pvals.p[c] = p_value_from_scores(scores, alpha, table.pvalue_mode);
    }
    return pvals;
}

PredictionSet prediction_set(const PValueVector& pvals, double epsilon) {
    PredictionSet set;
    set.epsilon = epsilon;
    for (int c = 0; c < 2; ++c) set.contains[c] = pvals.p[c] > epsilon;
    return set;
}

ConfidenceCredibility confidence_credibility(const PValueVector& pvals) {
    ConfidenceCredibility cc;
    cc.point_label = pvals.p[0] >= pvals.p[1] ? 0 : 1;
    cc.credibility = pvals.p[cc.point_label];
    cc.confidence = 1.0 - pvals.p[1 - cc.point_label];
    return cc;
}

CoverageReport evaluate_coverage(const CalibrationTable& table, const KnnModel& model,
                                 const DiskSampleTable& test,
                                 const std::vector<double>& epsilons, bool mondrian) {
    if (test.rows.empty()) throw EmptyTest();
    std::vector<PValueVector> pvals;
    std::vector<int> labels;
    pvals.reserve(test.rows.size());
    labels.reserve(test.rows.size());
    for (const auto& r : test.rows) {
        pvals.push_back(p_values(table, model, feature_vector(r, model.uses_bms), mondrian));
        labels.push_back(r.label);
    }
    return coverage_from_pvalues(pvals, labels, epsilons);
}

CoverageReport coverage_from_pvalues(const std::vector<PValueVector>& pvals,
                                     const std::vector<int>& labels,
                                     const std::vector<double>& epsilons) {
    if (pvals.empty() || pvals.size() != labels.size()) throw EmptyTest();
    std::array<std::size_t, 2> class_count{};
    for (int label : labels) ++class_count[label];
    CoverageReport report;
    const auto n = static_cast<double>(pvals.size());
    for (double eps : epsilons) {
        CoverageRow row;
        row.epsilon = eps;
        std::size_t covered = 0, total_size = 0;
        std::array<std::size_t, 2> class_misses{};
        for (std::size_t i = 0; i < pvals.size(); ++i) {
            auto set = prediction_set(pvals[i], eps);
            total_size += static_cast<std::size_t>(set.size());
            if (set.contains[labels[i]])
                ++covered;
            else
                ++class_misses[labels[i]];
        }
        row.effective_coverage = static_cast<double>(covered) / n;
        row.average_set_size = static_cast<double>(total_size) / n;
        for (int c = 0; c < 2; ++c)
            row.class_error[c] = class_count[c] == 0
                                     ? 0.0
                                     : static_cast<double>(class_misses[c]) /
                                           static_cast<double>(class_count[c]);
        report.rows.push_back(row);
    }
    return report;
}

void save_calibration(const CalibrationTable& table, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["mode"] = to_string(table.mode);
    j["pvalue_mode"] = to_string(table.pvalue_mode);
    j["scores_class0"] = table.scores_by_class[0];
    j["scores_class1"] = table.scores_by_class[1];
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

CalibrationTable load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open calibration file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format_version").get<int>() != 1)
            throw Error("unsupported calibration format version in " + path);
        CalibrationTable table;
        table.mode = nonconformity_mode_from_string(j.at("mode").get<std::string>());
        table.pvalue_mode = pvalue_mode_from_string(j.at("pvalue_mode").get<std::string>());
        table.scores_by_class[0] = j.at("scores_class0").get<std::vector<double>>();
        table.scores_by_class[1] = j.at("scores_class1").get<std::vector<double>>();
        for (int c = 0; c < 2; ++c)
            if (table.scores_by_class[c].empty()) throw ClassAbsent(c);
        table.pooled_scores = table.scores_by_class[0];
        table.pooled_scores.insert(table.pooled_scores.end(), table.scores_by_class[1].begin(),
                                   table.scores_by_class[1].end());
        std::sort(table.pooled_scores.begin(), table.pooled_scores.end());
        table.q = table.pooled_scores.size();
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid calibration JSON in " + path + ": " + e.what());
    }
}

const char* to_string(NonconformityMode mode) {
    return mode == NonconformityMode::margin ? "margin" : "inverse_probability";
}

const char* to_string(PValueMode mode) {
    return mode == PValueMode::paper ? "paper" : "conservative";
}

NonconformityMode nonconformity_mode_from_string(const std::string& s) {
    if (s == "margin") return NonconformityMode::margin;
    if (s == "inverse_probability") return NonconformityMode::inverse_probability;
    throw Error("unknown nonconformity mode: " + s);
}

PValueMode pvalue_mode_from_string(const std::string& s) {
    if (s == "paper") return PValueMode::paper;
    if (s == "conservative") return PValueMode::conservative;
    throw Error("unknown p-value mode: " + s);
}

}  // namespace fleetscrub
