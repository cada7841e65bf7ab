#include "fleetscrub/smart_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fleetscrub/csv.hpp"
#include "fleetscrub/errors.hpp"

namespace fleetscrub {

namespace {

const char* const kSmartColumnNames[kSmartValueCount] = {
    "smart_1",   "smart_3",   "smart_5",   "smart_7",   "smart_9",
    "smart_187", "smart_189", "smart_194", "smart_195", "smart_197"};

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

double require_double(const std::vector<std::string>& fields, int pos, std::size_t line,
                      const char* what) {
    auto v = csv::parse_double(fields[static_cast<std::size_t>(pos)]);
    if (!v) throw MalformedRow(line, std::string("non-numeric ") + what);
    return *v;
}

std::int64_t require_int(const std::vector<std::string>& fields, int pos, std::size_t line,
                         const char* what) {
    auto v = csv::parse_int(fields[static_cast<std::size_t>(pos)]);
    if (!v) throw MalformedRow(line, std::string("non-integer ") + what);
    return *v;
}

}  // namespace

std::int64_t DiskSampleTable::disk_count() const {
    std::unordered_set<int> disks;
    for (const auto& r : rows) disks.insert(r.disk_index);
    return static_cast<std::int64_t>(disks.size());
}

std::int64_t DiskSampleTable::failed_disk_count() const {
    std::unordered_map<int, bool> all_failed;
    for (const auto& r : rows) {
        auto [it, inserted] = all_failed.try_emplace(r.disk_index, true);
        if (r.label != kLabelFailed) it->second = false;
    }
    std::int64_t n = 0;
    for (const auto& [disk, failed] : all_failed)
        if (failed) ++n;
    return n;
}

bool DiskSampleTable::has_full_bms() const {
    if (rows.empty()) return false;
    return std::all_of(rows.begin(), rows.end(),
                       [](const DiskSample& r) { return r.bms_error_count.has_value(); });
}

std::size_t DiskSampleTable::feature_dim() const {
    return kSmartValueCount + kRawValueCount + (has_full_bms() ? 1 : 0);
}

std::vector<double> feature_vector(const DiskSample& sample, bool include_bms) {
    std::vector<double> x;
    x.reserve(kSmartValueCount + kRawValueCount + 1);
    x.insert(x.end(), sample.smart_values.begin(), sample.smart_values.end());
    x.insert(x.end(), sample.raw_values.begin(), sample.raw_values.end());
    if (include_bms) {
        if (!sample.bms_error_count)
            throw Error("sample lacks the BMS error count the model was fitted with");
        x.push_back(static_cast<double>(*sample.bms_error_count));
    }
    return x;
}

int ColumnSchema::required_columns() const {
    if (column_count > 0) return column_count;
    int max_pos = std::max(disk_index, label);
    for (int p : smart_values) max_pos = std::max(max_pos, p);
    for (int p : raw_values) max_pos = std::max(max_pos, p);
    if (bms_error_count) max_pos = std::max(max_pos, *bms_error_count);
    if (timestamp_hour) max_pos = std::max(max_pos, *timestamp_hour);
    return max_pos + 1;
}

ColumnSchema ColumnSchema::baidu() { return ColumnSchema{}; }

ColumnSchema ColumnSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open schema file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid schema JSON in " + path + ": " + e.what());
    }
    ColumnSchema s;
    try {
        if (j.contains("disk_index")) s.disk_index = j.at("disk_index").get<int>();
        if (j.contains("smart_values")) {
            auto v = j.at("smart_values").get<std::vector<int>>();
            if (v.size() != kSmartValueCount)
                throw Error("schema must map exactly " + std::to_string(kSmartValueCount) +
                            " smart_values columns");
            std::copy(v.begin(), v.end(), s.smart_values.begin());
        }
        if (j.contains("raw_values")) {
            auto v = j.at("raw_values").get<std::vector<int>>();
            if (v.size() != kRawValueCount)
                throw Error("schema must map exactly " + std::to_string(kRawValueCount) +
                            " raw_values columns");
            std::copy(v.begin(), v.end(), s.raw_values.begin());
        }
        if (j.contains("label")) s.label = j.at("label").get<int>();
        if (j.contains("bms_error_count") && !j.at("bms_error_count").is_null())
            s.bms_error_count = j.at("bms_error_count").get<int>();
        if (j.contains("timestamp_hour") && !j.at("timestamp_hour").is_null())
            s.timestamp_hour = j.at("timestamp_hour").get<int>();
        if (j.contains("column_count")) s.column_count = j.at("column_count").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("invalid schema JSON in " + path + ": " + e.what());
    }
    return s;
}

void SplitSpec::validate() const {
    auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
    if (!in_unit(proper_train_fraction) || !in_unit(calibration_fraction) ||
        !in_unit(test_fraction))
        throw Error("split fractions must lie in (0,1)");
    double sum = proper_train_fraction + calibration_fraction + test_fraction;
    if (std::abs(sum - 1.0) > 1e-9) throw Error("split fractions must sum to 1");
}

DiskSampleTable parse_smart_dataset(const std::string& path, const ColumnSchema& schema) {
    auto lines = csv::read_lines(path);
    const int want = schema.required_columns();

    DiskSampleTable table;
    bool header_checked = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (is_blank(lines[i])) continue;
        auto fields = csv::split_fields(lines[i]);
        if (!header_checked) {
            header_checked = true;
            // Header row detected by a non-numeric first field.
            if (!csv::is_numeric_like(fields.front())) continue;
        }
        if (static_cast<int>(fields.size()) != want)
            throw MalformedRow(line_no, "expected " + std::to_string(want) + " fields, got " +
                                            std::to_string(fields.size()));
        DiskSample s;
        auto idx = require_int(fields, schema.disk_index, line_no, "disk index");
        if (idx < 1) throw MalformedRow(line_no, "disk index must be >= 1");
        s.disk_index = static_cast<int>(idx);
        for (std::size_t f = 0; f < kSmartValueCount; ++f)
            s.smart_values[f] = require_double(fields, schema.smart_values[f], line_no,
                                               kSmartColumnNames[f]);
        for (std::size_t f = 0; f < kRawValueCount; ++f)
            s.raw_values[f] = require_double(fields, schema.raw_values[f], line_no, "raw value");
        auto label = require_int(fields, schema.label, line_no, "label");
        if (label != kLabelFailed && label != kLabelFunctional)
            throw MalformedRow(line_no, "label must be 0 or 1");
        s.label = static_cast<int>(label);
        if (schema.bms_error_count) {
            const auto& field = fields[static_cast<std::size_t>(*schema.bms_error_count)];
            if (!field.empty()) {
                auto bms = require_int(fields, *schema.bms_error_count, line_no, "bms count");
                if (bms < 0) throw MalformedRow(line_no, "bms count must be >= 0");
                s.bms_error_count = bms;
            }
        }
        if (schema.timestamp_hour) {
            const auto& field = fields[static_cast<std::size_t>(*schema.timestamp_hour)];
            if (!field.empty())
                s.timestamp_hour = require_int(fields, *schema.timestamp_hour, line_no, "hour");
        }
        table.rows.push_back(std::move(s));
    }
    if (table.rows.empty()) throw EmptyFile(path);
    return table;
}

UtilizationSeries parse_utilization_log(const std::string& path, UtilizationSource source) {
    auto lines = csv::read_lines(path);
    UtilizationSeries series;
    series.source = source;
    bool header_checked = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (is_blank(lines[i])) continue;
        auto fields = csv::split_fields(lines[i]);
        if (!header_checked) {
            header_checked = true;
            if (!csv::is_numeric_like(fields.front())) continue;
        }
        if (fields.size() != 2)
            throw MalformedRow(line_no, "expected 2 fields, got " +
                                            std::to_string(fields.size()));
        auto hour = csv::parse_int(fields[0]);
        if (!hour) throw MalformedRow(line_no, "non-integer hour index");
        auto pct = csv::parse_double(fields[1]);
        if (!pct) throw MalformedRow(line_no, "non-numeric utilization");
        if (*pct < 0.0 || *pct > 100.0) throw OutOfRange(*pct);
        if (!series.samples.empty() && *hour <= series.samples.back().hour_index)
            throw NonMonotonicTime(*hour);
        series.samples.push_back({*hour, *pct});
    }
    if (series.samples.empty()) throw EmptyFile(path);
    return series;
}

namespace {

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, this one is pinned.
void shuffle_disks(std::vector<int>& disks, std::mt19937_64& gen) {
    for (std::size_t i = disks.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(gen() % i);
        std::swap(disks[i - 1], disks[j]);
    }
}

// Largest-remainder allocation of n disks over the three partitions,
// guaranteeing at least one disk each (n >= 3 checked by the caller).
std::array<std::size_t, 3> allocate(std::size_t n, const std::array<double, 3>& fractions) {
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (int p = 0; p < 3; ++p) {
        double exact = static_cast<double>(n) * fractions[p];
        counts[p] = static_cast<std::size_t>(std::floor(exact));
        remainders[p] = exact - std::floor(exact);
        assigned += counts[p];
    }
    for (std::size_t left = n - assigned; left > 0; --left) {
        int best = 0;
        for (int p = 1; p < 3; ++p)
            if (remainders[p] > remainders[best]) best = p;
        ++counts[best];
        remainders[best] = -1.0;
    }
    for (int p = 0; p < 3; ++p) {
        while (counts[p] == 0) {
            int donor = 0;
            for (int q = 1; q < 3; ++q)
                if (counts[q] > counts[donor]) donor = q;
            --counts[donor];
            ++counts[p];
        }
    }
    return counts;
}

}  // namespace

SplitResult split_dataset(const DiskSampleTable& table, const SplitSpec& spec) {
    spec.validate();
    if (table.rows.empty()) throw Error("cannot split an empty table");

    // Disk-level label: failed if any row is failed.
    std::map<int, int> disk_label;
    for (const auto& r : table.rows) {
        auto [it, inserted] = disk_label.try_emplace(r.disk_index, r.label);
        if (r.label == kLabelFailed) it->second = kLabelFailed;
    }

    std::array<std::vector<int>, 2> by_class;
    for (const auto& [disk, label] : disk_label) by_class[label].push_back(disk);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < 3) throw ClassAbsent(c);

    const std::array<double, 3> fractions = {spec.proper_train_fraction,
                                             spec.calibration_fraction, spec.test_fraction};
    std::mt19937_64 gen(spec.seed);
    std::unordered_map<int, int> partition_of;  // disk -> 0 train, 1 cal, 2 test
    for (int c = 0; c < 2; ++c) {
        auto& disks = by_class[c];  // sorted by disk_index via std::map iteration
        shuffle_disks(disks, gen);
        auto counts = allocate(disks.size(), fractions);
        std::size_t pos = 0;
        for (int p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < counts[p]; ++i) partition_of[disks[pos++]] = p;
    }

    SplitResult result;
    DiskSampleTable* parts[3] = {&result.train, &result.calibration, &result.test};
    for (const auto& r : table.rows) parts[partition_of.at(r.disk_index)]->rows.push_back(r);
    return result;
}

void save_canonical(const DiskSampleTable& table, const std::string& path) {
    bool any_bms = std::any_of(table.rows.begin(), table.rows.end(),
                               [](const DiskSample& r) { return r.bms_error_count.has_value(); });
    bool any_ts = std::any_of(table.rows.begin(), table.rows.end(),
                              [](const DiskSample& r) { return r.timestamp_hour.has_value(); });
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "disk_index";
    for (const char* name : kSmartColumnNames) out << ',' << name;
    out << ",raw_5,raw_197,label";
    if (any_bms) out << ",bms_error_count";
    if (any_ts) out << ",timestamp_hour";
    out << '\n';
    for (const auto& r : table.rows) {
        out << r.disk_index;
        for (double v : r.smart_values) out << ',' << csv::format_double(v);
        for (double v : r.raw_values) out << ',' << csv::format_double(v);
        out << ',' << r.label;
        if (any_bms) {
            out << ',';
            if (r.bms_error_count) out << *r.bms_error_count;
        }
        if (any_ts) {
            out << ',';
            if (r.timestamp_hour) out << *r.timestamp_hour;
        }
        out << '\n';
    }
}

DiskSampleTable load_canonical(const std::string& path) {
    auto lines = csv::read_lines(path);
    std::size_t first = 0;
    while (first < lines.size() && is_blank(lines[first])) ++first;
    if (first == lines.size()) throw EmptyFile(path);
    auto header = csv::split_fields(lines[first]);
    if (header.empty() || header[0] != "disk_index")
        throw Error("not a canonical sample file: " + path);
    ColumnSchema schema;  // canonical order matches the Baidu layout
    schema.column_count = static_cast<int>(header.size());
    for (std::size_t h = kSmartValueCount + kRawValueCount + 2; h < header.size(); ++h) {
        if (header[h] == "bms_error_count")
            schema.bms_error_count = static_cast<int>(h);
        else if (header[h] == "timestamp_hour")
            schema.timestamp_hour = static_cast<int>(h);
        else
            throw Error("unknown canonical column: " + header[h]);
    }
    return parse_smart_dataset(path, schema);
}

void save_utilization(const UtilizationSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "hour_index,utilization_pct\n";
    for (const auto& s : series.samples)
        out << s.hour_index << ',' << csv::format_double(s.utilization_pct) << '\n';
}

}  // namespace fleetscrub
