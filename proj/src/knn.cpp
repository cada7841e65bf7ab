#include "fleetscrub/knn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fleetscrub/errors.hpp"

namespace fleetscrub {

std::vector<double> FeatureScaler::apply(std::span<const double> x) const {
    std::vector<double> scaled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = (x[i] - means[i]) / std_devs[i];
    return scaled;
}

FeatureScaler FeatureScaler::fit(const std::vector<double>& data, std::size_t dim) {
    const std::size_t n = data.size() / dim;
    FeatureScaler s;
    s.means.assign(dim, 0.0);
    s.std_devs.assign(dim, 0.0);
    s.constant.assign(dim, 0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < dim; ++c) s.means[c] += data[r * dim + c];
    for (std::size_t c = 0; c < dim; ++c) s.means[c] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            double d = data[r * dim + c] - s.means[c];
            s.std_devs[c] += d * d;
        }
    for (std::size_t c = 0; c < dim; ++c) {
        s.std_devs[c] = std::sqrt(s.std_devs[c] / static_cast<double>(n));
        if (s.std_devs[c] < 1e-12 * std::max(1.0, std::abs(s.means[c]))) {
            s.std_devs[c] = 1.0;
            s.constant[c] = 1;
        }
    }
    return s;
}

KnnModel fit_knn(const DiskSampleTable& train, int k) {
    if (k < 1) throw Error("k must be >= 1");
    if (train.rows.size() < static_cast<std::size_t>(k))
        throw TooFewPoints(train.rows.size(), static_cast<std::size_t>(k));
    bool seen[2] = {false, false};
    for (const auto& r : train.rows) seen[r.label] = true;
    if (!seen[0] || !seen[1]) throw SingleClassTraining();

    KnnModel model;
    model.k = k;
    model.uses_bms = train.has_full_bms();
    model.dim = train.feature_dim();
    std::vector<double> raw;
    raw.reserve(train.rows.size() * model.dim);
    model.labels.reserve(train.rows.size());
    for (const auto& r : train.rows) {
        auto x = feature_vector(r, model.uses_bms);
        raw.insert(raw.end(), x.begin(), x.end());
        model.labels.push_back(r.label);
    }
    model.scaler = FeatureScaler::fit(raw, model.dim);
    model.points.resize(raw.size());
    const std::size_t n = model.labels.size();
    for (std::size_t r = 0; r < n; ++r) {
        auto scaled = model.scaler.apply(
            std::span<const double>(raw.data() + r * model.dim, model.dim));
        std::copy(scaled.begin(), scaled.end(), model.points.begin() + r * model.dim);
    }
    return model;
}

ClassProbabilities predict_proba(const KnnModel& model, std::span<const double> x) {
    if (x.size() != model.dim) throw DimensionMismatch(x.size(), model.dim);
    if (model.size() < static_cast<std::size_t>(model.k))
        throw TooFewPoints(model.size(), static_cast<std::size_t>(model.k));
    const auto q = model.scaler.apply(x);
    const std::size_t n = model.size();
    std::vector<double> d2(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double* p = model.points.data() + r * model.dim;
        double acc = 0.0;
        for (std::size_t c = 0; c < model.dim; ++c) {
            double d = q[c] - p[c];
            acc += d * d;
        }
        d2[r] = acc;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto closer = [&](std::size_t a, std::size_t b) {
        if (d2[a] != d2[b]) return d2[a] < d2[b];
        return a < b;  // tie-break toward the lower training-row index
    };
    const auto k = static_cast<std::size_t>(model.k);
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), closer);
    int votes[2] = {0, 0};
    for (std::size_t i = 0; i < k; ++i) ++votes[model.labels[order[i]]];
    ClassProbabilities probs;
    probs.p[0] = static_cast<double>(votes[0]) / static_cast<double>(model.k);
    probs.p[1] = static_cast<double>(votes[1]) / static_cast<double>(model.k);
    return probs;
}

double nonconformity(const ClassProbabilities& probs, int hypothesized_label,
                     NonconformityMode mode) {
    const double own = probs.p[hypothesized_label];
    if (mode == NonconformityMode::inverse_probability) return 1.0 - own;
    return probs.p[1 - hypothesized_label] - own;
}

void save_model(const KnnModel& model, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["k"] = model.k;
    j["dim"] = model.dim;
    j["distance"] = "euclidean";
    j["uses_bms"] = model.uses_bms;
    j["scaler"] = {{"means", model.scaler.means},
                   {"std_devs", model.scaler.std_devs},
                   {"constant", model.scaler.constant}};
    j["labels"] = model.labels;
    j["points"] = model.points;
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

KnnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format_version").get<int>() != 1)
            throw Error("unsupported model format version in " + path);
        if (j.at("distance").get<std::string>() != "euclidean")
            throw Error("unsupported distance metric in " + path);
        KnnModel model;
        model.k = j.at("k").get<int>();
        model.dim = j.at("dim").get<std::size_t>();
        model.uses_bms = j.at("uses_bms").get<bool>();
        model.scaler.means = j.at("scaler").at("means").get<std::vector<double>>();
        model.scaler.std_devs = j.at("scaler").at("std_devs").get<std::vector<double>>();
        model.scaler.constant = j.at("scaler").at("constant").get<std::vector<std::uint8_t>>();
        model.labels = j.at("labels").get<std::vector<int>>();
        model.points = j.at("points").get<std::vector<double>>();
        if (model.points.size() != model.labels.size() * model.dim)
            throw Error("model point matrix has inconsistent shape in " + path);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid model JSON in " + path + ": " + e.what());
    }
}

}  // namespace fleetscrub
