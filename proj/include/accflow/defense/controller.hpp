#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "accflow/defense/flow_key.hpp"
#include "accflow/defense/stats.hpp"
#include "accflow/net/router.hpp"
#include "accflow/sim/rng.hpp"

namespace accflow::defense {

/// Keys whose ULR is an outlier: ulr >= aggressive_abs and
/// ulr >= aggressive_gap * max(median of the other keys' ULRs, median_floor).
std::set<FlowKey> aggressive_detect(const PeriodSnapshot& snapshot, const DefenseConfig& cfg);

enum class DropVerdict { Keep, Drop };

/// Early Drop for one arriving packet of `key`, judged against the
/// previous period's snapshot. Draws from rng only on a probabilistic branch.
DropVerdict early_drop_decision(const FlowKey& key, const PeriodSnapshot& snapshot, size_t queue_occupancy,
                                size_t buffer_capacity, const DefenseConfig& cfg, sim::RngStream& rng);

enum class ArrivalOutcome { Delivered, DroppedTail, DroppedByDefense };

/// The accountability controller attached to the bottleneck router:
/// per-period statistics, Early Drop and Aggressive Detection.
class AccFlowController final : public net::AdmissionHook {
public:
    AccFlowController(DefenseConfig cfg, sim::RngStream rng);

    net::Screening screen(const net::Packet& pkt, size_t occupancy, size_t capacity, SimTime now) override;
    void record(const net::Packet& pkt, net::AdmitResult result, SimTime now) override;

    void record_arrival(const FlowKey& key, ArrivalOutcome outcome, SimTime now);
    /// Closes the running period at `now` and returns its snapshot, which
    /// then governs decisions until the next boundary.
    const PeriodSnapshot& finalize_period(SimTime now);

    /// Snapshot in force for the running period (all zero before the first boundary).
    const PeriodSnapshot& governing() const { return history_.empty() ? initial_ : history_.back(); }
    const std::vector<PeriodSnapshot>& history() const { return history_; }
    bool is_blocked(const FlowKey& key, SimTime now) const;
    const DefenseConfig& config() const { return cfg_; }
    const sim::RngStream& rng() const { return rng_; }

private:
    struct Counter {
        uint64_t arrivals = 0;
        uint64_t drops = 0;
        uint64_t defense_drops = 0;
    };

    DefenseConfig cfg_;
    sim::RngStream rng_;
    std::map<FlowKey, Counter> current_;
    uint64_t current_arrivals_ = 0;
    uint64_t current_drops_ = 0;
    uint64_t current_defense_drops_ = 0;
    SimTime period_start_;
    /// key -> time the block lapses (SimTime::max() for permanent).
    std::map<FlowKey, SimTime> blocked_;
    PeriodSnapshot initial_;
    std::vector<PeriodSnapshot> history_;
};

}  // namespace accflow::defense
