#include "accflow/net/link.hpp"

#include <algorithm>
#include <string>

#include "accflow/net/packet.hpp"

namespace accflow::net {

std::string format_address(Address addr) {
    return std::to_string((addr >> 24) & 0xff) + '.' + std::to_string((addr >> 16) & 0xff) + '.' +
           std::to_string((addr >> 8) & 0xff) + '.' + std::to_string(addr & 0xff);
}

Link::Transit Link::transmit(SimTime now, uint32_t size_bytes) {
    Transit t;
    t.start = std::max(now, busy_until_);
    t.finish = t.start + sim::serialization_time(size_bytes, bandwidth_bps_);
    t.arrival = t.finish + prop_delay_;
    busy_until_ = t.finish;
    return t;
}

}  // namespace accflow::net
