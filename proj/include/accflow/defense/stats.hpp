#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "accflow/defense/flow_key.hpp"
#include "accflow/sim/time.hpp"

namespace accflow::defense {

using sim::SimTime;

struct DefenseConfig {
    /// Early Drop and Aggressive Detection active. Statistics are collected
    /// either way.
    bool enabled = true;
    SimTime detection_period = SimTime::ms(500);
    /// Aggregate-loss gate.
    double th1 = 0.30;
    /// Accountability floor, packets per period.
    uint64_t th2 = 5;
    /// Queue-occupancy threshold as a fraction of the buffer.
    double th3_fraction = 0.10;
    bool aggressive_detection = true;
    double aggressive_abs = 0.05;
    double aggressive_gap = 10.0;
    /// Lower bound on the median term of the gap test.
    double median_floor = 1e-6;
    /// Empty means blocked keys stay blocked for the rest of the run.
    std::optional<SimTime> block_duration;
    AggregationMode aggregation = AggregationMode::PerConnection;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    bool operator==(const DefenseConfig&) const = default;
};

struct FlowStats {
    uint64_t usage = 0;
    uint64_t drops = 0;
    /// Subset of drops made by Early Drop.
    uint64_t defense_drops = 0;
    double loss_rate = 0.0;
    double usage_rate = 0.0;
    double ulr = 0.0;
};

/// loss_rate * usage_rate.
double uniform_loss_rate(const FlowStats& stats);

/// Fills the ratio fields from the counters; degenerate ratios are 0.
FlowStats make_flow_stats(uint64_t usage, uint64_t drops, uint64_t defense_drops, uint64_t total_arrivals);

/// Statistics of one finished detection period. The snapshot of period k
/// governs every decision made during period k + 1.
struct PeriodSnapshot {
    uint64_t index = 0;
    SimTime start;
    SimTime end;
    uint64_t arrivals = 0;
    uint64_t drops = 0;
    uint64_t defense_drops = 0;
    double aggregate_loss = 0.0;
    std::map<FlowKey, FlowStats> flows;
    /// Keys blocked when the period closed, including newly flagged ones.
    std::set<FlowKey> blocked;
    std::vector<FlowKey> newly_blocked;

    const FlowStats* find(const FlowKey& key) const {
        auto it = flows.find(key);
        return it == flows.end() ? nullptr : &it->second;
    }
};

}  // namespace accflow::defense
