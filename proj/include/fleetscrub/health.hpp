#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fleetscrub/conformal.hpp"

namespace fleetscrub {

enum class ScrubCycle { A_low, B_medium, C_high, none };

const char* to_string(ScrubCycle cycle);
ScrubCycle scrub_cycle_from_string(const std::string& s);

/// Administrator acceptance threshold plus the health-score bands that map
/// concern disks onto scrub cycles. Bands are half-open [lo, hi) and must
/// cover [0, 1 - threshold) contiguously.
struct ThresholdPolicy {
    struct Band {
        double lo = 0.0;
        double hi = 0.0;
        ScrubCycle cycle = ScrubCycle::none;
    };

    double threshold = 0.01;
    std::vector<Band> cycle_bands;

    void validate() const;
    static ThresholdPolicy defaults(double threshold = 0.01);
};

enum class Disposition { replacement, no_concern, concern };

const char* to_string(Disposition d);

struct DiskHealth {
    int disk_index = 0;
    int point_label = kLabelFunctional;
    double health_score = 0.0;  // confidence of the conformal prediction
    double credibility = 0.0;
    bool concern = false;
    ScrubCycle cycle = ScrubCycle::none;

    Disposition disposition() const;
};

struct BucketHistogram {
    std::vector<double> edges;          // b+1 ascending; last bucket closed at the top
    std::vector<std::int64_t> counts;   // b
    std::int64_t below_lowest = 0;
    std::int64_t above_highest = 0;
};

struct HealthReport {
    std::vector<DiskHealth> disks;           // input order
    std::vector<DiskHealth> ranked_concern;  // worst health first, ties by disk index
    BucketHistogram buckets;
    std::int64_t selected_count = 0;
    std::int64_t skipped_count = 0;
    std::int64_t replacement_count = 0;

    std::int64_t fleet_size() const {
        return selected_count + skipped_count + replacement_count;
    }
};

struct SelectionArithmetic {
    std::int64_t selected = 0;
    double fraction_pct = 0.0;
};

/// Health score = confidence. Failed point label goes to the replacement path;
/// functional disks at or above 1 - threshold are no-concern; the rest are
/// concern disks with a cycle from the policy bands.
DiskHealth score_disk(int disk_index, const PValueVector& pvals, const ThresholdPolicy& policy);

ScrubCycle map_to_cycle(const DiskHealth& health, const ThresholdPolicy& policy);

/// Histogram is over functional-labeled disks.
HealthReport selection_summary(const std::vector<DiskHealth>& healths,
                               const std::vector<double>& bucket_edges);

/// Sums the underflow count plus every bucket whose upper edge is at or below
/// select_edge; fraction is relative to the given fleet size.
SelectionArithmetic select_below(const BucketHistogram& buckets, double select_edge,
                                 std::int64_t fleet_size);

/// Default report-histogram edges over the top of the score range.
std::vector<double> default_bucket_edges();

}  // namespace fleetscrub
