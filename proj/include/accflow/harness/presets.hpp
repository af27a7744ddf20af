#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "accflow/harness/scenario.hpp"

namespace accflow::harness {

/// Command-line overrides applied on top of a preset's own defaults.
struct PresetOptions {
    std::optional<uint32_t> attackers;
    std::optional<double> rate_mbps;
    std::optional<bool> defense;
    std::optional<uint64_t> seed;
    /// Number of normal flows (baseline, benign-periodic, normal-40).
    std::optional<uint32_t> flows;
};

std::vector<std::string> preset_names();

/// Throws ScenarioError for an unknown name or an override the preset
/// cannot take.
Scenario make_preset(const std::string& name, const PresetOptions& options = {});

}  // namespace accflow::harness
