#pragma once

#include <cstdint>

#include "accflow/sim/time.hpp"

namespace accflow::net {

using sim::SimTime;

/// Point-to-point FIFO link: a packet starts serializing when the link frees
/// up, and reaches the far end prop_delay after its last bit leaves.
class Link {
public:
    Link(uint64_t bandwidth_bps, SimTime prop_delay) : bandwidth_bps_(bandwidth_bps), prop_delay_(prop_delay) {}

    struct Transit {
        SimTime start;
        SimTime finish;   // last bit on the wire
        SimTime arrival;  // last bit at the far end
    };

    Transit transmit(SimTime now, uint32_t size_bytes);

    uint64_t bandwidth_bps() const { return bandwidth_bps_; }
    SimTime prop_delay() const { return prop_delay_; }
    SimTime busy_until() const { return busy_until_; }
    bool idle(SimTime now) const { return busy_until_ <= now; }

private:
    uint64_t bandwidth_bps_;
    SimTime prop_delay_;
    SimTime busy_until_;
};

}  // namespace accflow::net
