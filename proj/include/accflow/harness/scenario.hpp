#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "accflow/defense/stats.hpp"
#include "accflow/traffic/profiles.hpp"
#include "accflow/traffic/tcp.hpp"

namespace accflow::harness {

using sim::SimTime;

/// Raised for unparsable or out-of-range scenario input; the message names the field.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Topology {
    uint64_t bottleneck_bps = 10'000'000;
    uint64_t access_bps = 100'000'000;
    SimTime access_delay = SimTime::ms(2);
    SimTime bottleneck_delay = SimTime::ms(40);
    SimTime receiver_delay = SimTime::ms(2);
    uint32_t buffer_packets = 40;

    bool operator==(const Topology&) const = default;
};

struct LegitFlowSpec {
    std::string label;
    uint64_t rate_bps = 1'000'000;
    SimTime start;
    /// Overrides Topology::access_delay for this host.
    std::optional<SimTime> access_delay;

    bool operator==(const LegitFlowSpec&) const = default;
};

struct PeriodicFlowSpec {
    std::string label = "periodic";
    traffic::PeriodicBenignProfile profile;

    bool operator==(const PeriodicFlowSpec&) const = default;
};

struct MetricsConfig {
    SimTime bin_width = SimTime::ms(500);
    uint32_t convergence_hold = 3;

    bool operator==(const MetricsConfig&) const = default;
};

struct OutputConfig {
    std::string dir;
    bool event_log = false;

    bool operator==(const OutputConfig&) const = default;
};

inline defense::DefenseConfig statistics_only_defense() {
    defense::DefenseConfig c;
    c.enabled = false;
    return c;
}

using AttackSpec = std::variant<traffic::AttackProfile, traffic::SstfProfile>;

struct Scenario {
    std::string name = "custom";
    SimTime duration = SimTime::sec(60);
    uint64_t seed = 1;
    Topology topology;
    traffic::TcpConfig tcp;
    std::vector<LegitFlowSpec> legitimate;
    std::optional<AttackSpec> attack;
    std::optional<PeriodicFlowSpec> benign_periodic;
    /// enabled == false keeps statistics collection but no dropping.
    defense::DefenseConfig defense = statistics_only_defense();
    MetricsConfig metrics;
    OutputConfig outputs;

    std::optional<SimTime> attack_start() const;

    /// Throws ScenarioError naming the first offending field.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

/// Parses and validates; unknown fields are rejected.
Scenario scenario_from_json(const nlohmann::json& j);
/// Full echo with every default spelled out.
nlohmann::ordered_json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace accflow::harness
