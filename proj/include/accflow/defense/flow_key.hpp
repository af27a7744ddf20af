#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "accflow/net/packet.hpp"

namespace accflow::defense {

enum class AggregationMode { PerConnection, PerSourceAddress };

const char* to_string(AggregationMode mode);
AggregationMode parse_aggregation_mode(const std::string& s);

/// Accountability identity: a connection, or every connection from one
/// source address.
struct FlowKey {
    AggregationMode mode = AggregationMode::PerConnection;
    uint64_t value = 0;

    auto operator<=>(const FlowKey&) const = default;
};

/// "conn:<flow_id>" or "src:<dotted address>".
std::string to_string(const FlowKey& key);

FlowKey aggregate_key(const net::Packet& pkt, AggregationMode mode);

}  // namespace accflow::defense
