#pragma once

#include <cstdint>
#include <string>

#include "accflow/sim/time.hpp"

namespace accflow::net {

inline constexpr uint32_t kPacketBytes = 1000;
inline constexpr uint64_t kPacketBits = kPacketBytes * 8;

/// IPv4 address in host byte order.
using Address = uint32_t;

constexpr Address make_address(uint8_t a, uint8_t b, uint8_t c, uint8_t d) {
    return (Address{a} << 24) | (Address{b} << 16) | (Address{c} << 8) | Address{d};
}
std::string format_address(Address addr);

struct Packet {
    uint32_t flow_id = 0;
    Address src_addr = 0;
    uint32_t size_bytes = kPacketBytes;
    /// Transmission counter, unique per flow (retransmissions get a new one).
    uint64_t seq = 0;
    /// TCP data sequence; equals seq for non-TCP sources.
    uint64_t data_seq = 0;
    sim::SimTime emitted_at;
    bool retransmit = false;
};

}  // namespace accflow::net
