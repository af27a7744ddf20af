#include "accflow/net/router.hpp"

#include <stdexcept>

namespace accflow::net {

const char* to_string(AdmitResult r) {
    switch (r) {
    case AdmitResult::Enqueued: return "enqueued";
    case AdmitResult::DroppedByDefense: return "defense";
    case AdmitResult::DroppedTail: return "tail";
    }
    return "unknown";
}

RouterQueue::RouterQueue(size_t capacity, AdmissionHook* hook) : capacity_(capacity), hook_(hook) {
    if (capacity == 0) throw std::invalid_argument("router buffer capacity must be positive");
}

Admission RouterQueue::admit(const Packet& pkt, SimTime now) {
    Admission out{AdmitResult::Enqueued};
    if (hook_) {
        const Screening s = hook_->screen(pkt, queue_.size(), capacity_, now);
        if (s == Screening::Blocked) {
            ++dropped_defense_;
            return Admission{AdmitResult::DroppedByDefense, true};
        }
        if (s == Screening::EarlyDrop) out.result = AdmitResult::DroppedByDefense;
    }
    if (out.result == AdmitResult::Enqueued && queue_.size() >= capacity_) {
        out.result = AdmitResult::DroppedTail;
    }
    switch (out.result) {
    case AdmitResult::Enqueued:
        queue_.push_back(pkt);
        ++enqueued_;
        break;
    case AdmitResult::DroppedByDefense: ++dropped_defense_; break;
    case AdmitResult::DroppedTail: ++dropped_tail_; break;
    }
    if (queue_.size() > capacity_) throw std::logic_error("router occupancy exceeds capacity");
    if (hook_) hook_->record(pkt, out.result, now);
    return out;
}

std::optional<Packet> RouterQueue::dequeue() {
    if (queue_.empty()) return std::nullopt;
    Packet p = queue_.front();
    queue_.pop_front();
    return p;
}

}  // namespace accflow::net
