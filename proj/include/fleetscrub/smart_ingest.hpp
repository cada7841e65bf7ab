#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fleetscrub {

inline constexpr std::size_t kSmartValueCount = 10;  // SMART IDs 1,3,5,7,9,187,189,194,195,197
inline constexpr std::size_t kRawValueCount = 2;     // raw SMART 5, raw SMART 197
inline constexpr int kLabelFailed = 0;
inline constexpr int kLabelFunctional = 1;

/// One SMART observation row: disk index, 10 normalized attribute values,
/// 2 raw sector counters, binary label, optional BMS error count and hour stamp.
struct DiskSample {
    int disk_index = 0;
    std::array<double, kSmartValueCount> smart_values{};
    std::array<double, kRawValueCount> raw_values{};
    int label = kLabelFunctional;
    std::optional<std::int64_t> bms_error_count;
    std::optional<std::int64_t> timestamp_hour;
};

struct DiskSampleTable {
    std::vector<DiskSample> rows;

    std::int64_t disk_count() const;
    /// Disks all of whose rows carry label 0.
    std::int64_t failed_disk_count() const;
    /// True when every row carries a BMS error count; only then is it usable as a feature.
    bool has_full_bms() const;
    std::size_t feature_dim() const;
};

/// Feature vector for the classifier: smart values, raw counters, and the BMS
/// count when include_bms is set.
std::vector<double> feature_vector(const DiskSample& sample, bool include_bms);

enum class UtilizationSource { disk_busy, cpu_busy };

struct UtilizationSeries {
    struct Sample {
        std::int64_t hour_index = 0;
        double utilization_pct = 0.0;
    };
    std::vector<Sample> samples;  // hour_index strictly increasing
    UtilizationSource source = UtilizationSource::disk_busy;
};

/// Column-position descriptor for SMART CSV files (0-based). Defaults follow
/// the Baidu layout: index, 10 attribute values, 2 raw counters, label.
struct ColumnSchema {
    int disk_index = 0;
    std::array<int, kSmartValueCount> smart_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::array<int, kRawValueCount> raw_values = {11, 12};
    int label = 13;
    std::optional<int> bms_error_count;
    std::optional<int> timestamp_hour;
    /// Expected field count per row; 0 means "highest mapped position + 1".
    int column_count = 0;

    int required_columns() const;
    static ColumnSchema baidu();
    /// Loads a JSON descriptor ({"disk_index":0,"smart_values":[...],...}).
    static ColumnSchema load(const std::string& path);
};

struct SplitSpec {
    double proper_train_fraction = 0.5;
    double calibration_fraction = 0.25;
    double test_fraction = 0.25;
    std::uint64_t seed = 0;

    void validate() const;  // fractions in (0,1), summing to 1 within 1e-9
};

struct SplitResult {
    DiskSampleTable train;
    DiskSampleTable calibration;
    DiskSampleTable test;
};

DiskSampleTable parse_smart_dataset(const std::string& path,
                                    const ColumnSchema& schema = ColumnSchema::baidu());

UtilizationSeries parse_utilization_log(
    const std::string& path, UtilizationSource source = UtilizationSource::disk_busy);

/// Disk-level stratified split: every row of one disk lands in one partition,
/// both classes appear in every partition, deterministic for a fixed seed.
SplitResult split_dataset(const DiskSampleTable& table, const SplitSpec& spec);

/// Canonical CSV artifacts (Baidu column order plus optional trailing columns).
void save_canonical(const DiskSampleTable& table, const std::string& path);
DiskSampleTable load_canonical(const std::string& path);
void save_utilization(const UtilizationSeries& series, const std::string& path);

}  // namespace fleetscrub
