#include "accflow/traffic/profiles.hpp"

#include <algorithm>
#include <cmath>

namespace accflow::traffic {

namespace {

constexpr uint64_t kBitMicros = net::kPacketBits * 1'000'000;

// Offset (us) of aggregate packet index `a` from the start of a pacing train at rate R.
uint64_t paced_offset(uint64_t a, uint64_t rate_bps) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * kBitMicros) / rate_bps);
}

// Smallest per-subflow index i with paced_offset(j + i*n) >= phase.
uint64_t first_index_at_or_after(uint64_t phase_us, uint32_t j, uint32_t n, uint64_t rate_bps) {
    // floor(x) >= p  <=>  x >= p for integer p, so solve (j + i*n) * B >= phase * R.
    const unsigned __int128 need = static_cast<unsigned __int128>(phase_us) * rate_bps;
    const unsigned __int128 have = static_cast<unsigned __int128>(j) * kBitMicros;
    if (need <= have) return 0;
    const unsigned __int128 step = static_cast<unsigned __int128>(n) * kBitMicros;
    return static_cast<uint64_t>((need - have + step - 1) / step);
}

}  // namespace

uint64_t PeriodicBenignProfile::chunk_bytes() const {
    return static_cast<uint64_t>(
        std::llround(static_cast<double>(peak_rate_bps) * period.seconds() * duty / 8.0));
}

uint64_t PeriodicBenignProfile::chunk_packets() const {
    return (chunk_bytes() + net::kPacketBytes - 1) / net::kPacketBytes;
}

SimTime subflow_packet_gap(const AttackProfile& profile) {
    return SimTime::us(kBitMicros * profile.n_subflows / profile.rate_bps);
}

SimTime jittered_send_time(const AttackProfile& p, SimTime nominal, double u) {
    if (p.pacing_jitter <= 0.0) return nominal;
    const double gap = static_cast<double>(kBitMicros * p.n_subflows) / static_cast<double>(p.rate_bps);
    uint64_t shift = static_cast<uint64_t>(u * p.pacing_jitter * gap);
    if (shift >= static_cast<uint64_t>(gap)) shift = gap >= 1.0 ? static_cast<uint64_t>(gap) - 1 : 0;
    if (p.kind == AttackKind::LowRateSquareWave && nominal >= p.start) {
        const SimTime burst_start = p.start + p.period * ((nominal - p.start) / p.period);
        const SimTime last = burst_start + p.burst - SimTime::us(1);
        if (nominal + SimTime::us(shift) > last) return std::max(nominal, last);
    }
    return nominal + SimTime::us(shift);
}

Emission squarewave_next_emission(const AttackProfile& p, uint32_t subflow, SimTime now) {
    Emission out;
    if (p.rate_bps == 0 || p.n_subflows == 0 || p.period.count() == 0) return out;
    uint64_t burst_index = 0;
    uint64_t phase = 0;
    if (now >= p.start) {
        const SimTime since = now - p.start;
        burst_index = since / p.period;
        phase = (since % p.period).count();
        out.burst_active = phase < p.burst.count();
    }
    const uint64_t D = p.burst.count();
    if (paced_offset(subflow, p.rate_bps) >= D) return out;  // subflow never fits in a burst

    uint64_t i = first_index_at_or_after(phase, subflow, p.n_subflows, p.rate_bps);
    uint64_t off = paced_offset(subflow + i * p.n_subflows, p.rate_bps);
    if (off >= D) {
        ++burst_index;
        off = paced_offset(subflow, p.rate_bps);
    }
    out.next_send_time = p.start + p.period * burst_index + SimTime::us(off);
    return out;
}

std::optional<SimTime> constant_rate_emission(const AttackProfile& p, uint32_t subflow, SimTime now) {
    if (p.rate_bps == 0 || p.n_subflows == 0) return std::nullopt;
    const uint64_t phase = now >= p.start ? (now - p.start).count() : 0;
    const uint64_t i = first_index_at_or_after(phase, subflow, p.n_subflows, p.rate_bps);
    return p.start + SimTime::us(paced_offset(subflow + i * p.n_subflows, p.rate_bps));
}

net::Address sstf_source_address(const SstfProfile& p, uint32_t attacker, uint64_t ordinal) {
    if (p.spoof_sources) {
        return net::make_address(172, static_cast<uint8_t>(16 + (attacker & 0x0f)),
                                 static_cast<uint8_t>((ordinal >> 8) & 0xff),
                                 static_cast<uint8_t>(ordinal & 0xff));
    }
    const uint32_t host = attacker + 1;
    return net::make_address(10, 3, static_cast<uint8_t>(host >> 8), static_cast<uint8_t>(host & 0xff));
}

std::vector<SpawnRequest> sstf_spawner_tick(const SstfProfile& p, SimTime now) {
    std::vector<SpawnRequest> out;
    if (now < p.start || p.spawn_interval.count() == 0) return out;
    const SimTime since = now - p.start;
    if ((since % p.spawn_interval).count() != 0) return out;
    const uint64_t ordinal = since / p.spawn_interval;
    out.reserve(p.n_attackers);
    for (uint32_t k = 0; k < p.n_attackers; ++k) {
        out.push_back(SpawnRequest{k, ordinal, sstf_source_address(p, k, ordinal)});
    }
    return out;
}

uint64_t periodic_benign_tick(const PeriodicBenignProfile& p, SimTime now) {
    if (now < p.start || p.period.count() == 0) return 0;
    if (((now - p.start) % p.period).count() != 0) return 0;
    return p.chunk_packets();
}

}  // namespace accflow::traffic
