#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "accflow/net/packet.hpp"
#include "accflow/sim/time.hpp"

namespace accflow::traffic {

using sim::SimTime;

enum class AttackKind { LowRateSquareWave, SSTF, ConstantRate };

/// Non-responsive attacker: {R, P, D} square wave, or a constant-rate
/// flood when kind == ConstantRate (period/burst ignored). Subflows share
/// the peak rate evenly and are interleaved so the aggregate is paced at R.
struct AttackProfile {
    AttackKind kind = AttackKind::LowRateSquareWave;
    uint64_t rate_bps = 30'000'000;
    SimTime period = SimTime::ms(200);
    SimTime burst = SimTime::ms(67);
    uint32_t n_subflows = 1;
    /// true: every subflow has its own source address; false: all share one.
    bool spoof_sources = true;
    SimTime start = SimTime::sec(5);
    /// Each packet is sent at a uniformly random point in the first
    /// pacing_jitter fraction of its slot (0 = exact pacing).
    double pacing_jitter = 1.0;

    bool operator==(const AttackProfile&) const = default;
};

struct SstfProfile {
    uint32_t n_attackers = 10;
    uint64_t per_flow_rate_bps = 3'000'000;
    SimTime spawn_interval = SimTime::ms(200);
    uint32_t flow_payload = 75;
    /// true: every short flow gets a fresh source address.
    bool spoof_sources = false;
    SimTime start = SimTime::sec(5);

    bool operator==(const SstfProfile&) const = default;
};

struct PeriodicBenignProfile {
    uint64_t peak_rate_bps = 3'000'000;
    SimTime period = SimTime::ms(200);
    /// Fraction of each period the chunk would occupy at peak rate.
    double duty = 1.0 / 3.0;
    SimTime start = SimTime::sec(0);

    /// peak_rate * period * duty / 8.
    uint64_t chunk_bytes() const;
    uint64_t chunk_packets() const;

    bool operator==(const PeriodicBenignProfile&) const = default;
};

struct Emission {
    /// Earliest emission at or after `now`; empty when the source never sends.
    std::optional<SimTime> next_send_time;
    bool burst_active = false;
};

/// Next emission of `subflow` for a square-wave profile.
/// burst_active reports whether `now` falls inside an on-period.
Emission squarewave_next_emission(const AttackProfile& profile, uint32_t subflow, SimTime now);

/// Next emission of `subflow` for a constant-rate profile.
std::optional<SimTime> constant_rate_emission(const AttackProfile& profile, uint32_t subflow,
                                              SimTime now);

/// Gap between consecutive packets of one subflow (R / n_subflows pacing).
SimTime subflow_packet_gap(const AttackProfile& profile);

/// Send time for a packet whose paced slot starts at `nominal`: shifted by
/// u * pacing_jitter * gap for u in [0, 1), and kept inside the burst for
/// square-wave profiles. Packets of one subflow never reorder.
SimTime jittered_send_time(const AttackProfile& profile, SimTime nominal, double u);

struct SpawnRequest {
    uint32_t attacker = 0;
    /// Index of this flow among all flows spawned by the attacker.
    uint64_t ordinal = 0;
    net::Address src_addr = 0;
};

/// Short flows to start at `now`. Non-empty only at spawn ticks
/// (start + k * spawn_interval).
std::vector<SpawnRequest> sstf_spawner_tick(const SstfProfile& profile, SimTime now);

/// Source address of attacker k's flow `ordinal` under the spoof setting.
net::Address sstf_source_address(const SstfProfile& profile, uint32_t attacker, uint64_t ordinal);

/// Packets the benign periodic application writes to its socket at `now`:
/// one chunk at every period start, nothing otherwise.
uint64_t periodic_benign_tick(const PeriodicBenignProfile& profile, SimTime now);

}  // namespace accflow::traffic
