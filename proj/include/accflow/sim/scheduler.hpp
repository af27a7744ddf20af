#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "accflow/sim/time.hpp"

namespace accflow::sim {

enum class EventKind : uint8_t {
    PacketArrival,
    PacketDeparture,
    TimerExpiry,
    PeriodBoundary,
    SourceWakeup,
};

std::string_view to_string(EventKind kind);

struct EventHandle {
    uint64_t seq = UINT64_MAX;
    bool valid() const { return seq != UINT64_MAX; }
};

enum class CancelResult { Cancelled, AlreadyFired };

/// Discrete-event scheduler. Events dispatch in (fire_at, seq) order where
/// seq is the insertion counter, so simultaneous events run FIFO.
///
/// When an event log stream is attached, one tab-separated line
/// `time_us seq kind flow_key detail` is written per dispatched event.
/// Handlers append to the detail field through note().
class Scheduler {
public:
    using Handler = std::function<void()>;

    /// flow_id 0 means "no flow" and is logged as '-'.
    EventHandle schedule(SimTime fire_at, EventKind kind, Handler handler, uint32_t flow_id = 0);
    EventHandle schedule_in(SimTime delay, EventKind kind, Handler handler, uint32_t flow_id = 0) {
        return schedule(now_ + delay, kind, std::move(handler), flow_id);
    }

    /// Throws std::logic_error for a handle this scheduler never issued.
    CancelResult cancel(EventHandle handle);

    /// Dispatches every event with fire_at <= t_end; afterwards now() == t_end.
    uint64_t run_until(SimTime t_end);

    SimTime now() const { return now_; }
    uint64_t dispatched() const { return dispatched_; }
    size_t pending() const { return live_.size(); }

    void attach_log(std::ostream* out) { log_ = out; }
    bool logging() const { return log_ != nullptr; }
    /// Adds text to the detail column of the event being dispatched.
    void note(std::string_view text);

private:
    struct Entry {
        SimTime fire_at;
        uint64_t seq;
        EventKind kind;
        uint32_t flow_id;
        Handler handler;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    std::vector<Entry> heap_;
    std::unordered_set<uint64_t> live_;
    std::unordered_set<uint64_t> cancelled_;
    SimTime now_;
    uint64_t next_seq_ = 0;
    uint64_t dispatched_ = 0;
    std::ostream* log_ = nullptr;
    std::string detail_;
};

}  // namespace accflow::sim
