#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "accflow/net/packet.hpp"
#include "accflow/sim/scheduler.hpp"
#include "accflow/sim/time.hpp"

namespace accflow::traffic {

using sim::SimTime;

struct TcpConfig {
    SimTime min_rto = SimTime::ms(200);
    SimTime max_rto = SimTime::sec(60);
    uint32_t initial_cwnd = 1;
    /// Receiver window, packets.
    uint32_t max_cwnd = 64;
    /// Application data (packets) the socket buffers beyond what was acked.
    uint32_t send_buffer_packets = 128;
    bool fast_retransmit = false;
    uint32_t dupack_threshold = 3;

    bool operator==(const TcpConfig&) const = default;
};

enum class TcpPhase { SlowStart, CongestionAvoidance, TimeoutWait };

const char* to_string(TcpPhase phase);

struct InflightEntry {
    SimTime sent_at;
    bool retransmitted = false;
    /// Acks seen for later sequences since this one was sent.
    uint32_t later_acks = 0;
};

/// Timeout-driven Reno-style congestion state, one per connection.
///
/// cwnd is a packet count. Congestion avoidance adds one packet after cwnd
/// acks (ca_acks counts them), which is the integer form of +1/cwnd per ack.
struct TcpState {
    uint32_t cwnd = 1;
    uint32_t ssthresh = UINT32_MAX;
    uint32_t ca_acks = 0;
    TcpPhase phase = TcpPhase::SlowStart;
    uint32_t backoff_exponent = 0;
    std::optional<SimTime> srtt;
    uint64_t next_seq = 0;
    std::map<uint64_t, InflightEntry> inflight;

    /// min_rto * 2^backoff_exponent, capped at max_rto.
    SimTime rto(const TcpConfig& cfg) const;
};

TcpState initial_tcp_state(const TcpConfig& cfg);

enum class AckOutcome { NewData, Duplicate };

/// Applies one ack. Acks for sequences not in flight are duplicates and leave
/// the state untouched. rtt_sample is empty for retransmitted segments.
AckOutcome tcp_on_ack(TcpState& state, const TcpConfig& cfg, uint64_t acked_seq,
                      std::optional<SimTime> rtt_sample);

/// Retransmission timer fired: halve ssthresh, collapse cwnd, back off and
/// enter TimeoutWait. Returns the in-flight sequences, now presumed lost.
std::vector<uint64_t> tcp_on_timeout(TcpState& state, const TcpConfig& cfg);

/// Duplicate-ack loss signal (only when fast_retransmit is enabled).
void tcp_on_fast_retransmit(TcpState& state);

/// A sending TCP endpoint: congestion state, retransmission queue, send
/// buffer and the single retransmission timer. The timer expires rto after
/// the oldest in-flight segment was sent.
class TcpSender {
public:
    using Emit = std::function<void(const net::Packet&)>;

    TcpSender(sim::Scheduler& sched, const TcpConfig& cfg, uint32_t flow_id, net::Address src,
              Emit emit);
    TcpSender(const TcpSender&) = delete;
    TcpSender& operator=(const TcpSender&) = delete;

    /// Application write of `packets`; returns how many fit in the send buffer.
    uint64_t offer(uint64_t packets);
    /// No further application data; finished() becomes true once all is acked.
    void close() { closed_ = true; }
    void on_ack(uint64_t data_seq);

    bool finished() const { return closed_ && acked_ == offered_; }
    const TcpState& state() const { return state_; }
    uint32_t flow_id() const { return flow_id_; }

    uint64_t emitted() const { return tx_counter_; }
    uint64_t timeouts() const { return timeouts_; }
    uint64_t offered() const { return offered_; }
    uint64_t acked() const { return acked_; }
    uint64_t buffered() const { return offered_ - acked_; }

private:
    void try_send();
    void transmit(uint64_t data_seq, bool retransmit);
    void rearm_timer();
    void on_timer();
    uint64_t snd_una() const;

    sim::Scheduler& sched_;
    TcpConfig cfg_;
    uint32_t flow_id_;
    net::Address src_;
    Emit emit_;

    TcpState state_;
    std::set<uint64_t> rtx_queue_;
    uint64_t offered_ = 0;
    uint64_t acked_ = 0;
    uint64_t tx_counter_ = 0;
    uint64_t timeouts_ = 0;
    bool closed_ = false;

    sim::EventHandle timer_;
    SimTime timer_at_;
    bool timer_armed_ = false;
};

}  // namespace accflow::traffic
