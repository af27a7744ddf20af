#include "accflow/harness/presets.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace accflow::harness {

namespace {

constexpr SimTime kAttackStart = SimTime::sec(5);
constexpr SimTime kStagger = SimTime::ms(100);

uint64_t mbps(double v) { return static_cast<uint64_t>(std::llround(v * 1e6)); }

void add_uniform_flows(Scenario& s, uint32_t n, double rate_mbps) {
    for (uint32_t i = 0; i < n; ++i) {
        s.legitimate.push_back({"legit-" + std::to_string(i + 1), mbps(rate_mbps), kStagger * i, std::nullopt});
    }
}

// 0.3, 0.4, ..., 1.1 Mbps.
void add_graded_flows(Scenario& s) {
    for (uint32_t i = 0; i < 9; ++i) {
        s.legitimate.push_back({"legit-" + std::to_string(i + 1), mbps(0.3 + 0.1 * i), kStagger * i, std::nullopt});
    }
}

traffic::AttackProfile square_wave(uint32_t subflows, double rate_mbps) {
    traffic::AttackProfile a;
    a.kind = traffic::AttackKind::LowRateSquareWave;
    a.rate_bps = mbps(rate_mbps);
    a.period = SimTime::ms(200);
    a.burst = SimTime::ms(67);
    a.n_subflows = subflows;
    a.start = kAttackStart;
    return a;
}

traffic::AttackProfile constant_rate(uint32_t subflows, double rate_mbps) {
    traffic::AttackProfile a = square_wave(subflows, rate_mbps);
    a.kind = traffic::AttackKind::ConstantRate;
    return a;
}

struct Preset {
    std::function<Scenario(const PresetOptions&)> build;
    bool takes_attackers = false;
    bool takes_rate = false;
    bool takes_flows = false;
};

Scenario base(const std::string& name) {
    Scenario s;
    s.name = name;
    s.duration = SimTime::sec(60);
    s.defense.enabled = false;
    return s;
}

Scenario low_rate_setting(const std::string& name, bool graded, uint32_t def_attackers, double def_rate,
                          const PresetOptions& o, bool constant) {
    Scenario s = base(name);
    graded ? add_graded_flows(s) : add_uniform_flows(s, 5, 1.0);
    const uint32_t n = o.attackers.value_or(def_attackers);
    const double r = o.rate_mbps.value_or(def_rate);
    s.attack = constant ? constant_rate(n, r) : square_wave(n, r);
    s.defense.enabled = true;
    return s;
}

const std::map<std::string, Preset>& registry() {
    static const std::map<std::string, Preset> presets = [] {
        std::map<std::string, Preset> m;
        m["baseline"] = {[](const PresetOptions& o) {
                             Scenario s = base("baseline");
                             add_uniform_flows(s, o.flows.value_or(9), 1.0);
                             return s;
                         },
                         false, false, true};
        m["baseline-attack"] = {[](const PresetOptions& o) {
                                    Scenario s = base("baseline-attack");
                                    add_uniform_flows(s, 9, 1.0);
                                    s.attack = square_wave(o.attackers.value_or(1), o.rate_mbps.value_or(30.0));
                                    return s;
                                },
                                true, true, false};
        m["normal-40"] = {[](const PresetOptions& o) {
                              Scenario s = base("normal-40");
                              add_uniform_flows(s, o.flows.value_or(40), 1.0);
                              return s;
                          },
                          false, false, true};
        m["setting-one"] = {[](const PresetOptions& o) { return low_rate_setting("setting-one", false, 20, 30.0, o, false); },
                            true, true, false};
        m["setting-two"] = {[](const PresetOptions& o) { return low_rate_setting("setting-two", true, 30, 30.0, o, false); },
                            true, true, false};
        m["setting-three"] = {[](const PresetOptions& o) {
                                  return low_rate_setting("setting-three", true, 5, 40.0, o, false);
                              },
                              true, true, false};
        m["general-dos-one"] = {[](const PresetOptions& o) {
                                    return low_rate_setting("general-dos-one", false, 20, 30.0, o, true);
                                },
                                true, true, false};
        m["general-dos-two"] = {[](const PresetOptions& o) {
                                    return low_rate_setting("general-dos-two", true, 30, 30.0, o, true);
                                },
                                true, true, false};
        m["general-dos-three"] = {[](const PresetOptions& o) {
                                      return low_rate_setting("general-dos-three", true, 5, 40.0, o, true);
                                  },
                                  true, true, false};
        m["general-dos"] = m["general-dos-one"];
        m["sstf"] = {[](const PresetOptions& o) {
                         Scenario s = base("sstf");
                         add_uniform_flows(s, 9, 1.0);
                         traffic::SstfProfile p;
                         p.n_attackers = o.attackers.value_or(10);
                         if (o.rate_mbps) p.per_flow_rate_bps = mbps(*o.rate_mbps);
                         p.spawn_interval = SimTime::ms(200);
                         p.start = kAttackStart;
                         s.attack = p;
                         s.defense.enabled = true;
                         s.defense.aggregation = defense::AggregationMode::PerSourceAddress;
                         return s;
                     },
                     true, true, false};
        m["benign-periodic"] = {[](const PresetOptions& o) {
                                    Scenario s = base("benign-periodic");
                                    add_uniform_flows(s, o.flows.value_or(5), 1.0);
                                    s.benign_periodic = PeriodicFlowSpec{};
                                    s.defense.enabled = true;
                                    return s;
                                },
                                false, false, true};
        return m;
    }();
    return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, p] : registry()) out.push_back(name);
    return out;
}

Scenario make_preset(const std::string& name, const PresetOptions& o) {
    const auto& reg = registry();
    auto it = reg.find(name);
    if (it == reg.end()) throw ScenarioError("preset: unknown name '" + name + "'");
    const Preset& p = it->second;
    if (o.attackers && !p.takes_attackers) throw ScenarioError("preset " + name + ": --attackers not applicable");
    if (o.rate_mbps && !p.takes_rate) throw ScenarioError("preset " + name + ": --rate not applicable");
    if (o.flows && !p.takes_flows) throw ScenarioError("preset " + name + ": --flows not applicable");
    if (o.rate_mbps && !(*o.rate_mbps > 0.0)) throw ScenarioError("preset " + name + ": --rate must be positive");

    Scenario s = p.build(o);
    if (name == "general-dos") s.name = name;
    if (o.defense) s.defense.enabled = *o.defense;
    if (o.seed) s.seed = *o.seed;
    s.validate();
    return s;
}

}  // namespace accflow::harness
