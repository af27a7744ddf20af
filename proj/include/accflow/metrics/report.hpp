#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "accflow/defense/stats.hpp"
#include "accflow/metrics/series.hpp"

namespace accflow::metrics {

enum class FlowRole { Legitimate, Attacker, Periodic };

const char* to_string(FlowRole role);

/// Everything measured for one flow label. An SSTF attacker's short flows
/// share a label, so a label can span several connections and keys.
struct FlowReport {
    std::string label;
    FlowRole role = FlowRole::Legitimate;
    /// Application rate for legitimate and periodic flows; 0 for attackers.
    uint64_t desired_rate_bps = 0;
    std::vector<defense::FlowKey> keys;
    ThroughputSeries series;
    uint64_t connections = 0;
    uint64_t emitted = 0;
    uint64_t delivered = 0;
    uint64_t dropped_tail = 0;
    uint64_t dropped_defense = 0;
    uint64_t timeouts = 0;
};

struct RunReport {
    /// The scenario exactly as run, defaults filled in.
    nlohmann::ordered_json scenario;
    SimTime duration;
    std::optional<SimTime> attack_start;
    std::vector<FlowReport> flows;
    std::vector<defense::PeriodSnapshot> periods;
    std::optional<SimTime> convergence_time;
    uint64_t events_dispatched = 0;
    uint64_t early_drop_draws = 0;

    const FlowReport* find_flow(const std::string& label) const;
};

/// Start of the earliest detection period beginning at or after
/// attack_start in which every legitimate flow has zero loss for `hold`
/// consecutive periods. A flow with no arrivals in a period counts as zero
/// loss, but a period in which no legitimate flow has arrivals is not clean.
std::optional<SimTime> convergence_time(const RunReport& report, SimTime attack_start, uint32_t hold = 3);

/// Start of the steady-state goodput window: the convergence time when one
/// was found, else the attack start; `warmup` for runs without an attack.
SimTime steady_state_start(const RunReport& report, SimTime warmup = SimTime::sec(5));

/// report.json body. Field order and number formatting are fixed, so equal
/// reports serialize to equal bytes.
nlohmann::ordered_json report_to_json(const RunReport& report);

/// `time_s,flow_label,mbps`, one row per flow per bin.
void write_throughput_csv(std::ostream& out, const RunReport& report);

/// `period_index,key,usage,drops,loss_rate,usage_rate,ulr,aggregate_loss,blocked`.
void write_periods_csv(std::ostream& out, const RunReport& report);

}  // namespace accflow::metrics
