#include "accflow/defense/flow_key.hpp"

#include <stdexcept>

namespace accflow::defense {

const char* to_string(AggregationMode mode) {
    return mode == AggregationMode::PerConnection ? "per_connection" : "per_source_address";
}

AggregationMode parse_aggregation_mode(const std::string& s) {
    if (s == "per_connection") return AggregationMode::PerConnection;
    if (s == "per_source_address") return AggregationMode::PerSourceAddress;
    throw std::invalid_argument("unknown aggregation mode '" + s + "'");
}

std::string to_string(const FlowKey& key) {
    if (key.mode == AggregationMode::PerConnection) return "conn:" + std::to_string(key.value);
    return "src:" + net::format_address(static_cast<net::Address>(key.value));
}

FlowKey aggregate_key(const net::Packet& pkt, AggregationMode mode) {
    if (mode == AggregationMode::PerConnection) return FlowKey{mode, pkt.flow_id};
    return FlowKey{mode, pkt.src_addr};
}

}  // namespace accflow::defense
