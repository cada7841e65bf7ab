#include "fleetscrub/health.hpp"

#include <algorithm>
#include <cmath>

#include "fleetscrub/errors.hpp"

namespace fleetscrub {

const char* to_string(ScrubCycle cycle) {
    switch (cycle) {
        case ScrubCycle::A_low: return "A";
        case ScrubCycle::B_medium: return "B";
        case ScrubCycle::C_high: return "C";
        case ScrubCycle::none: return "none";
    }
    return "none";
}

ScrubCycle scrub_cycle_from_string(const std::string& s) {
    if (s == "A") return ScrubCycle::A_low;
    if (s == "B") return ScrubCycle::B_medium;
    if (s == "C") return ScrubCycle::C_high;
    if (s == "none") return ScrubCycle::none;
    throw Error("unknown scrub cycle: " + s);
}

const char* to_string(Disposition d) {
    switch (d) {
        case Disposition::replacement: return "replacement";
        case Disposition::no_concern: return "no_concern";
        case Disposition::concern: return "concern";
    }
    return "no_concern";
}

void ThresholdPolicy::validate() const {
    if (threshold <= 0.0 || threshold >= 1.0) throw Error("threshold must lie in (0,1)");
    if (cycle_bands.empty()) throw Error("cycle bands must not be empty");
    const double top = 1.0 - threshold;
    if (cycle_bands.front().lo != 0.0) throw Error("cycle bands must start at 0");
    for (std::size_t i = 0; i < cycle_bands.size(); ++i) {
        if (cycle_bands[i].hi <= cycle_bands[i].lo) throw Error("cycle band must be nonempty");
        if (i + 1 < cycle_bands.size() && cycle_bands[i].hi != cycle_bands[i + 1].lo)
            throw Error("cycle bands must be contiguous");
    }
    if (std::abs(cycle_bands.back().hi - top) > 1e-9)
        throw Error("cycle bands must cover up to 1 - threshold");
}

ThresholdPolicy ThresholdPolicy::defaults(double threshold) {
    ThresholdPolicy policy;
    policy.threshold = threshold;
    // Default bands, clipped to the acceptance cut; bands entirely above the
    // cut disappear (scores there are no-concern, not scrubbed).
    const double top = 1.0 - threshold;
    const Band base_bands[] = {{0.0, 0.80, ScrubCycle::C_high},
                           {0.80, 0.95, ScrubCycle::B_medium},
                           {0.95, 1.0, ScrubCycle::A_low}};
    for (const auto& band : base_bands) {
        if (band.lo >= top) break;
        policy.cycle_bands.push_back({band.lo, std::min(band.hi, top), band.cycle});
    }
    policy.validate();
    return policy;
}

Disposition DiskHealth::disposition() const {
    if (point_label == kLabelFailed) return Disposition::replacement;
    return concern ? Disposition::concern : Disposition::no_concern;
}

DiskHealth score_disk(int disk_index, const PValueVector& pvals, const ThresholdPolicy& policy) {
    auto cc = confidence_credibility(pvals);
    DiskHealth health;
    health.disk_index = disk_index;
    health.point_label = cc.point_label;
    health.health_score = cc.confidence;
    health.credibility = cc.credibility;
    if (cc.point_label == kLabelFailed) {
        health.concern = false;  // replacement path, never scrubbed
    } else if (health.health_score >= 1.0 - policy.threshold) {
        health.concern = false;
    } else {
        health.concern = true;
        health.cycle = map_to_cycle(health, policy);
    }
    return health;
}

ScrubCycle map_to_cycle(const DiskHealth& health, const ThresholdPolicy& policy) {
    if (!health.concern) throw NotConcern(health.disk_index);
    for (const auto& band : policy.cycle_bands)
        if (health.health_score >= band.lo && health.health_score < band.hi) return band.cycle;
    throw Error("health score not covered by any cycle band");
}

HealthReport selection_summary(const std::vector<DiskHealth>& healths,
                               const std::vector<double>& bucket_edges) {
    if (healths.empty()) throw Error("cannot summarize an empty fleet");
    if (bucket_edges.size() < 2 || !std::is_sorted(bucket_edges.begin(), bucket_edges.end()))
        throw Error("bucket edges must be ascending with at least two entries");

    HealthReport report;
    report.disks = healths;
    report.buckets.edges = bucket_edges;
    report.buckets.counts.assign(bucket_edges.size() - 1, 0);
    for (const auto& h : healths) {
        switch (h.disposition()) {
            case Disposition::replacement: ++report.replacement_count; break;
            case Disposition::no_concern: ++report.skipped_count; break;
            case Disposition::concern:
                ++report.selected_count;
                report.ranked_concern.push_back(h);
                break;
        }
        if (h.point_label != kLabelFunctional) continue;
        if (h.health_score < bucket_edges.front()) {
            ++report.buckets.below_lowest;
        } else if (h.health_score > bucket_edges.back()) {
            ++report.buckets.above_highest;
        } else {
            // Last bucket is closed at the top edge.
            auto it = std::upper_bound(bucket_edges.begin(), bucket_edges.end(), h.health_score);
            auto idx = static_cast<std::size_t>(it - bucket_edges.begin());
            if (idx >= bucket_edges.size()) idx = bucket_edges.size() - 1;
            ++report.buckets.counts[idx - 1];
        }
    }
    std::sort(report.ranked_concern.begin(), report.ranked_concern.end(),
              [](const DiskHealth& a, const DiskHealth& b) {
                  if (a.health_score != b.health_score) return a.health_score < b.health_score;
                  return a.disk_index < b.disk_index;
              });
    return report;
}

SelectionArithmetic select_below(const BucketHistogram& buckets, double select_edge,
                                 std::int64_t fleet_size) {
    if (fleet_size <= 0) throw Error("fleet size must be positive");
    SelectionArithmetic result;
    result.selected = buckets.below_lowest;
    for (std::size_t b = 0; b < buckets.counts.size(); ++b)
        if (buckets.edges[b + 1] <= select_edge) result.selected += buckets.counts[b];
    result.fraction_pct =
        100.0 * static_cast<double>(result.selected) / static_cast<double>(fleet_size);
    return result;
}

std::vector<double> default_bucket_edges() { return {0.998, 0.9985, 0.999, 0.9995, 1.0}; }

}  // namespace fleetscrub
