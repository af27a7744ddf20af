#include "accflow/traffic/tcp.hpp"

#include <algorithm>

namespace accflow::traffic {

const char* to_string(TcpPhase phase) {
    switch (phase) {
    case TcpPhase::SlowStart: return "slow-start";
    case TcpPhase::CongestionAvoidance: return "congestion-avoidance";
    case TcpPhase::TimeoutWait: return "timeout-wait";
    }
    return "unknown";
}

SimTime TcpState::rto(const TcpConfig& cfg) const {
    SimTime r = cfg.min_rto;
    for (uint32_t i = 0; i < backoff_exponent && r < cfg.max_rto; ++i) r = r * 2;
    return std::min(r, cfg.max_rto);
}

TcpState initial_tcp_state(const TcpConfig& cfg) {
    TcpState s;
    s.cwnd = std::max<uint32_t>(1, cfg.initial_cwnd);
    return s;
}

AckOutcome tcp_on_ack(TcpState& state, const TcpConfig& cfg, uint64_t acked_seq,
                      std::optional<SimTime> rtt_sample) {
    auto it = state.inflight.find(acked_seq);
    if (it == state.inflight.end()) return AckOutcome::Duplicate;
    state.inflight.erase(it);

    if (state.phase == TcpPhase::TimeoutWait) state.phase = TcpPhase::SlowStart;

    if (state.phase == TcpPhase::SlowStart) {
        state.cwnd += 1;
        if (state.cwnd >= state.ssthresh) {
            state.phase = TcpPhase::CongestionAvoidance;
            state.ca_acks = 0;
        }
    } else {
        if (++state.ca_acks >= state.cwnd) {
            state.cwnd += 1;
            state.ca_acks = 0;
        }
    }
    state.cwnd = std::min(state.cwnd, std::max<uint32_t>(1, cfg.max_cwnd));
    state.backoff_exponent = 0;

    if (rtt_sample) {
        if (state.srtt) {
            state.srtt = SimTime::us((7 * state.srtt->count() + rtt_sample->count()) / 8);
        } else {
            state.srtt = *rtt_sample;
        }
    }
    return AckOutcome::NewData;
}

std::vector<uint64_t> tcp_on_timeout(TcpState& state, const TcpConfig& cfg) {
    state.ssthresh = std::max<uint32_t>(state.cwnd / 2, 2);
    state.cwnd = 1;
    state.ca_acks = 0;
    if (state.rto(cfg) < cfg.max_rto) ++state.backoff_exponent;
    state.phase = TcpPhase::TimeoutWait;

    std::vector<uint64_t> lost;
    lost.reserve(state.inflight.size());
    for (const auto& [seq, entry] : state.inflight) lost.push_back(seq);
    state.inflight.clear();
    return lost;
}

void tcp_on_fast_retransmit(TcpState& state) {
    state.ssthresh = std::max<uint32_t>(state.cwnd / 2, 2);
    state.cwnd = state.ssthresh;
    state.ca_acks = 0;
    state.phase = TcpPhase::CongestionAvoidance;
}

TcpSender::TcpSender(sim::Scheduler& sched, const TcpConfig& cfg, uint32_t flow_id,
                     net::Address src, Emit emit)
    : sched_(sched),
      cfg_(cfg),
      flow_id_(flow_id),
      src_(src),
      emit_(std::move(emit)),
      state_(initial_tcp_state(cfg)) {}

uint64_t TcpSender::offer(uint64_t packets) {
    if (closed_) return 0;
    const uint64_t room = cfg_.send_buffer_packets > buffered() ? cfg_.send_buffer_packets - buffered() : 0;
    const uint64_t accepted = std::min(room, packets);
    offered_ += accepted;
    if (accepted > 0) try_send();
    return accepted;
}

uint64_t TcpSender::snd_una() const {
    uint64_t una = state_.next_seq;
    if (!state_.inflight.empty()) una = std::min(una, state_.inflight.begin()->first);
    if (!rtx_queue_.empty()) una = std::min(una, *rtx_queue_.begin());
    return una;
}

void TcpSender::on_ack(uint64_t data_seq) {
    auto it = state_.inflight.find(data_seq);
    if (it == state_.inflight.end()) {
        // Original copy of a segment that was queued for retransmission.
        if (rtx_queue_.erase(data_seq) == 1) {
            ++acked_;
            rearm_timer();
            try_send();
        }
        return;
    }
    std::optional<SimTime> sample;
    if (!it->second.retransmitted) sample = sched_.now() - it->second.sent_at;
    tcp_on_ack(state_, cfg_, data_seq, sample);
    ++acked_;

    if (cfg_.fast_retransmit && !state_.inflight.empty()) {
        auto& [oldest, entry] = *state_.inflight.begin();
        if (oldest < data_seq && ++entry.later_acks >= cfg_.dupack_threshold && !entry.retransmitted) {
            tcp_on_fast_retransmit(state_);
            transmit(oldest, true);
        }
    }
    rearm_timer();
    try_send();
}

void TcpSender::try_send() {
    if (state_.phase == TcpPhase::TimeoutWait) return;
    for (;;) {
        if (state_.inflight.size() >= state_.cwnd) return;
        const uint64_t window_end = snd_una() + state_.cwnd;
        uint64_t seq;
        bool rtx;
        if (!rtx_queue_.empty()) {
            seq = *rtx_queue_.begin();
            rtx = true;
        } else if (state_.next_seq < offered_) {
            seq = state_.next_seq;
            rtx = false;
        } else {
            return;
        }
        if (seq >= window_end) return;
        if (rtx) {
            rtx_queue_.erase(rtx_queue_.begin());
        } else {
            ++state_.next_seq;
        }
        transmit(seq, rtx);
    }
}

void TcpSender::transmit(uint64_t data_seq, bool retransmit) {
    net::Packet pkt;
    pkt.flow_id = flow_id_;
    pkt.src_addr = src_;
    pkt.seq = tx_counter_++;
    pkt.data_seq = data_seq;
    pkt.emitted_at = sched_.now();
    pkt.retransmit = retransmit;
    state_.inflight[data_seq] = InflightEntry{sched_.now(), retransmit, 0};
    rearm_timer();
    emit_(pkt);
}

void TcpSender::rearm_timer() {
    if (state_.inflight.empty()) {
        if (timer_armed_) {
            sched_.cancel(timer_);
            timer_armed_ = false;
        }
        return;
    }
    SimTime oldest = SimTime::max();
    for (const auto& [seq, entry] : state_.inflight) oldest = std::min(oldest, entry.sent_at);
    const SimTime at = std::max(sched_.now(), oldest + state_.rto(cfg_));
    if (timer_armed_) {
        if (at == timer_at_) return;
        sched_.cancel(timer_);
    }
    timer_at_ = at;
    timer_armed_ = true;
    timer_ = sched_.schedule(at, sim::EventKind::TimerExpiry, [this] { on_timer(); }, flow_id_);
}

void TcpSender::on_timer() {
    timer_armed_ = false;
    ++timeouts_;
    for (uint64_t seq : tcp_on_timeout(state_, cfg_)) rtx_queue_.insert(seq);
    if (sched_.logging()) {
        sched_.note("rto_us=" + std::to_string(state_.rto(cfg_).count()) +
                    " backoff=" + std::to_string(state_.backoff_exponent));
    }
    if (!rtx_queue_.empty()) {
        const uint64_t probe = *rtx_queue_.begin();
        rtx_queue_.erase(rtx_queue_.begin());
        transmit(probe, true);
    }
}

}  // namespace accflow::traffic
