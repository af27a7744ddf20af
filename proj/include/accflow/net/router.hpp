#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

#include "accflow/net/packet.hpp"
#include "accflow/sim/time.hpp"

namespace accflow::net {

using sim::SimTime;

enum class AdmitResult { Enqueued, DroppedByDefense, DroppedTail };

const char* to_string(AdmitResult r);

enum class Screening { Pass, EarlyDrop, Blocked };

/// Pre-enqueue hook consulted by the bottleneck router.
class AdmissionHook {
public:
    virtual ~AdmissionHook() = default;
    virtual Screening screen(const Packet& pkt, size_t occupancy, size_t capacity, SimTime now) = 0;
    /// Outcome of every packet that was not dropped as blocked.
    virtual void record(const Packet& pkt, AdmitResult result, SimTime now) = 0;
};

struct Admission {
    AdmitResult result;
    bool blocked = false;
};

/// Finite drop-tail buffer of the bottleneck router. Checks run in order:
/// defense hook (blocked flows, early drop), tail drop, enqueue.
class RouterQueue {
public:
    explicit RouterQueue(size_t capacity, AdmissionHook* hook = nullptr);

    Admission admit(const Packet& pkt, SimTime now);
    /// Head-of-line packet, or nothing when empty. Occupancy drops here.
    std::optional<Packet> dequeue();

    size_t occupancy() const { return queue_.size(); }
    size_t capacity() const { return capacity_; }
    bool empty() const { return queue_.empty(); }
    const std::deque<Packet>& contents() const { return queue_; }

    uint64_t enqueued() const { return enqueued_; }
    uint64_t dropped_tail() const { return dropped_tail_; }
    uint64_t dropped_defense() const { return dropped_defense_; }

private:
    size_t capacity_;
    AdmissionHook* hook_;
    std::deque<Packet> queue_;
    uint64_t enqueued_ = 0;
    uint64_t dropped_tail_ = 0;
    uint64_t dropped_defense_ = 0;
};

}  // namespace accflow::net
