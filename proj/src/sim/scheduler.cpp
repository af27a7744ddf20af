#include "accflow/sim/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

namespace accflow::sim {

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::PacketArrival: return "packet-arrival";
    case EventKind::PacketDeparture: return "packet-departure";
    case EventKind::TimerExpiry: return "timer-expiry";
    case EventKind::PeriodBoundary: return "period-boundary";
    case EventKind::SourceWakeup: return "source-wakeup";
    }
    return "unknown";
}

EventHandle Scheduler::schedule(SimTime fire_at, EventKind kind, Handler handler, uint32_t flow_id) {
    if (fire_at < now_) {
        throw std::logic_error("event scheduled in the past: " + std::to_string(fire_at.count()) +
                               "us < now " + std::to_string(now_.count()) + "us");
    }
    const uint64_t seq = next_seq_++;
    heap_.push_back(Entry{fire_at, seq, kind, flow_id, std::move(handler)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    live_.insert(seq);
    return EventHandle{seq};
}

CancelResult Scheduler::cancel(EventHandle handle) {
    if (!handle.valid() || handle.seq >= next_seq_) {
        throw std::logic_error("cancel of unknown event handle");
    }
    if (live_.erase(handle.seq) == 1) {
        cancelled_.insert(handle.seq);
        return CancelResult::Cancelled;
    }
    return cancelled_.contains(handle.seq) ? CancelResult::Cancelled : CancelResult::AlreadyFired;
}

void Scheduler::note(std::string_view text) {
    if (!log_) return;
    if (!detail_.empty()) detail_.push_back(' ');
    detail_.append(text);
}

uint64_t Scheduler::run_until(SimTime t_end) {
    uint64_t count = 0;
    while (!heap_.empty() && heap_.front().fire_at <= t_end) {
        std::pop_heap(heap_.begin(), heap_.end(), Later{});
        Entry e = std::move(heap_.back());
        heap_.pop_back();
        if (cancelled_.erase(e.seq) == 1) continue;
        live_.erase(e.seq);

        now_ = e.fire_at;
        detail_.clear();
        e.handler();
        ++count;
        ++dispatched_;

        if (log_) {
            *log_ << now_.count() << '\t' << e.seq << '\t' << to_string(e.kind) << '\t';
            if (e.flow_id == 0) {
                *log_ << '-';
            } else {
                *log_ << 'f' << e.flow_id;
            }
            *log_ << '\t' << detail_ << '\n';
        }
    }
    if (t_end > now_) now_ = t_end;
    return count;
}

}  // namespace accflow::sim
