#include "accflow/defense/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace accflow::defense {

void DefenseConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("defense." + field + ": " + why);
    };
    if (detection_period.count() == 0) fail("detection_period_ms", "must be positive");
    if (!(th1 > 0.0 && th1 < 1.0)) fail("th1", "must lie in (0, 1)");
    if (th2 < 1) fail("th2", "must be at least 1");
    if (!(th3_fraction > 0.0 && th3_fraction < 1.0)) fail("th3_fraction", "must lie in (0, 1)");
    if (!(aggressive_abs >= 0.0 && aggressive_abs <= 1.0)) fail("aggressive_abs", "must lie in [0, 1]");
    if (!(aggressive_gap >= 1.0)) fail("aggressive_gap", "must be at least 1");
    if (!(median_floor > 0.0)) fail("median_floor", "must be positive");
    if (block_duration && block_duration->count() == 0) fail("block_duration_s", "must be positive");
}

double uniform_loss_rate(const FlowStats& stats) { return stats.loss_rate * stats.usage_rate; }

FlowStats make_flow_stats(uint64_t usage, uint64_t drops, uint64_t defense_drops, uint64_t total_arrivals) {
    FlowStats s;
    s.usage = usage;
    s.drops = drops;
    s.defense_drops = defense_drops;
    s.loss_rate = usage == 0 ? 0.0 : static_cast<double>(drops) / static_cast<double>(usage);
    s.usage_rate = total_arrivals == 0 ? 0.0 : static_cast<double>(usage) / static_cast<double>(total_arrivals);
    s.ulr = uniform_loss_rate(s);
    return s;
}

std::set<FlowKey> aggressive_detect(const PeriodSnapshot& snapshot, const DefenseConfig& cfg) {
    std::set<FlowKey> flagged;
    if (snapshot.flows.empty()) return flagged;

    std::vector<double> sorted;
    sorted.reserve(snapshot.flows.size());
    for (const auto& [key, st] : snapshot.flows) sorted.push_back(st.ulr);
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();

    for (const auto& [key, st] : snapshot.flows) {
        if (st.ulr < cfg.aggressive_abs) continue;
        // Median of the multiset with one copy of st.ulr removed.
        const size_t pos = static_cast<size_t>(std::lower_bound(sorted.begin(), sorted.end(), st.ulr) - sorted.begin());
        const size_t m = n - 1;
        auto kth = [&](size_t k) { return sorted[k < pos ? k : k + 1]; };
        double median = 0.0;
        if (m > 0) median = (m % 2 == 1) ? kth(m / 2) : 0.5 * (kth(m / 2 - 1) + kth(m / 2));
        if (st.ulr >= cfg.aggressive_gap * std::max(median, cfg.median_floor)) flagged.insert(key);
    }
    return flagged;
}

DropVerdict early_drop_decision(const FlowKey& key, const PeriodSnapshot& snapshot, size_t queue_occupancy,
                                size_t buffer_capacity, const DefenseConfig& cfg, sim::RngStream& rng) {
    if (!(snapshot.aggregate_loss > cfg.th1)) return DropVerdict::Keep;
    const FlowStats* st = snapshot.find(key);
    if (st == nullptr || st->usage <= cfg.th2) return DropVerdict::Keep;

    const bool high_loss = st->loss_rate > 0.5 * snapshot.aggregate_loss;
    const bool congested = static_cast<double>(queue_occupancy) > cfg.th3_fraction * static_cast<double>(buffer_capacity);
    if (high_loss || congested) {
        return rng.bernoulli(st->loss_rate) ? DropVerdict::Drop : DropVerdict::Keep;
    }
    return DropVerdict::Keep;
}

AccFlowController::AccFlowController(DefenseConfig cfg, sim::RngStream rng) : cfg_(std::move(cfg)), rng_(std::move(rng)) {
    cfg_.validate();
}

bool AccFlowController::is_blocked(const FlowKey& key, SimTime now) const {
    auto it = blocked_.find(key);
    return it != blocked_.end() && now < it->second;
}

net::Screening AccFlowController::screen(const net::Packet& pkt, size_t occupancy, size_t capacity, SimTime now) {
    if (!cfg_.enabled) return net::Screening::Pass;
    const FlowKey key = aggregate_key(pkt, cfg_.aggregation);
    if (is_blocked(key, now)) return net::Screening::Blocked;
    return early_drop_decision(key, governing(), occupancy, capacity, cfg_, rng_) == DropVerdict::Drop
               ? net::Screening::EarlyDrop
               : net::Screening::Pass;
}

void AccFlowController::record(const net::Packet& pkt, net::AdmitResult result, SimTime now) {
    ArrivalOutcome outcome = ArrivalOutcome::Delivered;
    if (result == net::AdmitResult::DroppedTail) outcome = ArrivalOutcome::DroppedTail;
    if (result == net::AdmitResult::DroppedByDefense) outcome = ArrivalOutcome::DroppedByDefense;
    record_arrival(aggregate_key(pkt, cfg_.aggregation), outcome, now);
}

void AccFlowController::record_arrival(const FlowKey& key, ArrivalOutcome outcome, SimTime) {
    Counter& c = current_[key];
    ++c.arrivals;
    ++current_arrivals_;
    if (outcome != ArrivalOutcome::Delivered) {
        ++c.drops;
        ++current_drops_;
    }
    if (outcome == ArrivalOutcome::DroppedByDefense) {
        ++c.defense_drops;
        ++current_defense_drops_;
    }
}

const PeriodSnapshot& AccFlowController::finalize_period(SimTime now) {
    PeriodSnapshot snap;
    snap.index = history_.size();
    snap.start = period_start_;
    snap.end = now;
    snap.arrivals = current_arrivals_;
    snap.drops = current_drops_;
    snap.defense_drops = current_defense_drops_;
    snap.aggregate_loss = current_arrivals_ == 0 ? 0.0
                                                 : static_cast<double>(current_drops_) /
                                                       static_cast<double>(current_arrivals_);
    for (const auto& [key, c] : current_) {
        snap.flows.emplace(key, make_flow_stats(c.arrivals, c.drops, c.defense_drops, current_arrivals_));
    }

    double ulr_sum = 0.0;
    for (const auto& [key, st] : snap.flows) ulr_sum += st.ulr;
    if (std::abs(ulr_sum - snap.aggregate_loss) > 1e-12) {
        throw std::logic_error("ULR identity violated in period " + std::to_string(snap.index));
    }

    for (auto it = blocked_.begin(); it != blocked_.end();) {
        it = (now >= it->second) ? blocked_.erase(it) : std::next(it);
    }
    if (cfg_.enabled && cfg_.aggressive_detection && snap.aggregate_loss > cfg_.th1) {
        const SimTime until = cfg_.block_duration ? now + *cfg_.block_duration : SimTime::max();
        for (const FlowKey& key : aggressive_detect(snap, cfg_)) {
            if (blocked_.emplace(key, until).second) snap.newly_blocked.push_back(key);
        }
    }
    for (const auto& [key, until] : blocked_) snap.blocked.insert(key);

    current_.clear();
    current_arrivals_ = current_drops_ = current_defense_drops_ = 0;
    period_start_ = now;
    history_.push_back(std::move(snap));
    return history_.back();
}

}  // namespace accflow::defense
