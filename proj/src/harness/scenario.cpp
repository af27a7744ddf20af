#include "accflow/harness/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace accflow::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Field-by-field reader over one JSON object that remembers which keys were
// consumed so leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("", "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        std::string where = path_;
        if (!key.empty()) where += where.empty() ? key : "." + key;
        throw ScenarioError((where.empty() ? std::string("scenario") : where) + ": " + why);
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key, double def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, "must be finite");
        return d;
    }

    double positive(const std::string& key, double def) {
        const double d = number(key, def);
        if (!(d > 0.0)) fail(key, "must be positive");
        return d;
    }

    double non_negative(const std::string& key, double def) {
        const double d = number(key, def);
        if (d < 0.0) fail(key, "must not be negative");
        return d;
    }

    uint64_t count(const std::string& key, uint64_t def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<int64_t>() < 0)) {
            fail(key, "expected a non-negative integer");
        }
        return v.get<uint64_t>();
    }

    bool boolean(const std::string& key, bool def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_boolean()) fail(key, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    SimTime seconds(const std::string& key, SimTime def) {
        return has(key) ? SimTime::from_seconds(non_negative(key, 0)) : def;
    }
    SimTime millis(const std::string& key, SimTime def) {
        return has(key) ? SimTime::from_millis(non_negative(key, 0)) : def;
    }
    uint64_t mbps(const std::string& key, uint64_t def_bps) {
        if (!has(key)) return def_bps;
        return static_cast<uint64_t>(std::llround(positive(key, 0) * 1e6));
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.contains(k)) fail(k, "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

double mbps_of(uint64_t bps) { return static_cast<double>(bps) / 1e6; }

traffic::AttackProfile read_rate_attack(ObjectReader& r, traffic::AttackKind kind) {
    traffic::AttackProfile p;
    p.kind = kind;
    p.rate_bps = r.mbps("rate_mbps", p.rate_bps);
    if (kind == traffic::AttackKind::LowRateSquareWave) {
        p.period = r.millis("period_ms", p.period);
        p.burst = r.millis("burst_ms", p.burst);
    }
    p.n_subflows = static_cast<uint32_t>(r.count("subflows", p.n_subflows));
    p.pacing_jitter = r.non_negative("pacing_jitter", p.pacing_jitter);
    p.spoof_sources = r.boolean("spoof_sources", p.spoof_sources);
    p.start = r.seconds("start_s", p.start);
    return p;
}

traffic::SstfProfile read_sstf(ObjectReader& r) {
    traffic::SstfProfile p;
    p.n_attackers = static_cast<uint32_t>(r.count("attackers", p.n_attackers));
    p.per_flow_rate_bps = r.mbps("per_flow_rate_mbps", p.per_flow_rate_bps);
    p.spawn_interval = r.millis("spawn_interval_ms", p.spawn_interval);
    p.flow_payload = static_cast<uint32_t>(r.count("flow_payload_packets", p.flow_payload));
    p.spoof_sources = r.boolean("spoof_sources", p.spoof_sources);
    p.start = r.seconds("start_s", p.start);
    return p;
}

}  // namespace

std::optional<SimTime> Scenario::attack_start() const {
    if (!attack) return std::nullopt;
    return std::visit([](const auto& p) { return p.start; }, *attack);
}

void Scenario::validate() const {
    auto fail = [](const std::string& field, const std::string& why) { throw ScenarioError(field + ": " + why); };
    if (duration.count() == 0) fail("duration_s", "must be positive");
    if (topology.bottleneck_bps == 0) fail("topology.bottleneck_mbps", "must be positive");
    if (topology.access_bps == 0) fail("topology.access_mbps", "must be positive");
    if (topology.buffer_packets == 0) fail("topology.buffer_packets", "must be positive");
    if (tcp.min_rto.count() == 0) fail("tcp.min_rto_ms", "must be positive");
    if (tcp.max_rto < tcp.min_rto) fail("tcp.max_rto_s", "must not be below min_rto");
    if (tcp.initial_cwnd == 0) fail("tcp.initial_cwnd", "must be positive");
    if (tcp.max_cwnd < tcp.initial_cwnd) fail("tcp.max_cwnd", "must be at least initial_cwnd");
    if (tcp.send_buffer_packets == 0) fail("tcp.send_buffer_packets", "must be positive");
    if (tcp.dupack_threshold == 0) fail("tcp.dupack_threshold", "must be positive");

    std::set<std::string> labels;
    for (size_t i = 0; i < legitimate.size(); ++i) {
        const auto& f = legitimate[i];
        const std::string at = "legitimate[" + std::to_string(i) + "]";
        if (f.label.empty()) fail(at + ".label", "must not be empty");
        if (!labels.insert(f.label).second) fail(at + ".label", "duplicate label '" + f.label + "'");
        if (f.rate_bps == 0) fail(at + ".rate_mbps", "must be positive");
    }
    if (attack) {
        if (const auto* a = std::get_if<traffic::AttackProfile>(&*attack)) {
            if (a->rate_bps == 0) fail("attack.rate_mbps", "must be positive");
            if (a->n_subflows == 0) fail("attack.subflows", "must be at least 1");
            if (!(a->pacing_jitter >= 0.0 && a->pacing_jitter <= 1.0)) fail("attack.pacing_jitter", "must lie in [0, 1]");
            if (a->kind == traffic::AttackKind::LowRateSquareWave) {
                if (a->period.count() == 0) fail("attack.period_ms", "must be positive");
                if (a->burst.count() == 0) fail("attack.burst_ms", "must be positive");
                if (a->burst > a->period) fail("attack.burst_ms", "must not exceed period_ms");
            }
        } else {
            const auto& s = std::get<traffic::SstfProfile>(*attack);
            if (s.per_flow_rate_bps == 0) fail("attack.per_flow_rate_mbps", "must be positive");
            if (s.spawn_interval.count() == 0) fail("attack.spawn_interval_ms", "must be positive");
            if (s.flow_payload == 0) fail("attack.flow_payload_packets", "must be positive");
        }
    }
    if (benign_periodic) {
        const auto& p = benign_periodic->profile;
        if (benign_periodic->label.empty()) fail("benign_periodic.label", "must not be empty");
        if (labels.contains(benign_periodic->label)) fail("benign_periodic.label", "duplicate label");
        if (p.peak_rate_bps == 0) fail("benign_periodic.peak_rate_mbps", "must be positive");
        if (p.period.count() == 0) fail("benign_periodic.period_ms", "must be positive");
        if (!(p.duty > 0.0 && p.duty <= 1.0)) fail("benign_periodic.duty", "must lie in (0, 1]");
    }
    try {
        defense.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
    if (duration <= defense.detection_period) fail("duration_s", "must exceed the detection period");
    if (metrics.bin_width.count() == 0) fail("metrics.bin_ms", "must be positive");
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    ObjectReader r(j, "");
    s.name = r.string("name", s.name);
    s.duration = r.seconds("duration_s", s.duration);
    s.seed = r.count("seed", s.seed);

    if (r.has("topology")) {
        ObjectReader t(r.raw("topology"), "topology");
        s.topology.bottleneck_bps = t.mbps("bottleneck_mbps", s.topology.bottleneck_bps);
        s.topology.access_bps = t.mbps("access_mbps", s.topology.access_bps);
        s.topology.access_delay = t.millis("access_delay_ms", s.topology.access_delay);
        s.topology.bottleneck_delay = t.millis("bottleneck_delay_ms", s.topology.bottleneck_delay);
        s.topology.receiver_delay = t.millis("receiver_delay_ms", s.topology.receiver_delay);
        s.topology.buffer_packets = static_cast<uint32_t>(t.count("buffer_packets", s.topology.buffer_packets));
        t.finish();
    }

    if (r.has("tcp")) {
        ObjectReader t(r.raw("tcp"), "tcp");
        s.tcp.min_rto = t.millis("min_rto_ms", s.tcp.min_rto);
        s.tcp.max_rto = t.seconds("max_rto_s", s.tcp.max_rto);
        s.tcp.initial_cwnd = static_cast<uint32_t>(t.count("initial_cwnd", s.tcp.initial_cwnd));
        s.tcp.max_cwnd = static_cast<uint32_t>(t.count("max_cwnd", s.tcp.max_cwnd));
        s.tcp.send_buffer_packets = static_cast<uint32_t>(t.count("send_buffer_packets", s.tcp.send_buffer_packets));
        s.tcp.fast_retransmit = t.boolean("fast_retransmit", s.tcp.fast_retransmit);
        s.tcp.dupack_threshold = static_cast<uint32_t>(t.count("dupack_threshold", s.tcp.dupack_threshold));
        t.finish();
    }

    if (r.has("legitimate")) {
        const json& arr = r.raw("legitimate");
        if (!arr.is_array()) r.fail("legitimate", "expected an array");
        for (size_t i = 0; i < arr.size(); ++i) {
            ObjectReader f(arr[i], "legitimate[" + std::to_string(i) + "]");
            LegitFlowSpec spec;
            spec.label = f.string("label", "legit-" + std::to_string(i + 1));
            spec.rate_bps = f.mbps("rate_mbps", spec.rate_bps);
            spec.start = f.seconds("start_s", spec.start);
            if (f.has("access_delay_ms")) spec.access_delay = f.millis("access_delay_ms", SimTime{});
            f.finish();
            s.legitimate.push_back(std::move(spec));
        }
    }

    if (r.has("attack")) {
        ObjectReader a(r.raw("attack"), "attack");
        const std::string kind = a.string("kind", "low_rate");
        if (kind == "low_rate") {
            s.attack = read_rate_attack(a, traffic::AttackKind::LowRateSquareWave);
        } else if (kind == "constant_rate") {
            s.attack = read_rate_attack(a, traffic::AttackKind::ConstantRate);
        } else if (kind == "sstf") {
            s.attack = read_sstf(a);
        } else {
            a.fail("kind", "expected low_rate, constant_rate or sstf");
        }
        a.finish();
    }

    if (r.has("benign_periodic")) {
        ObjectReader b(r.raw("benign_periodic"), "benign_periodic");
        PeriodicFlowSpec p;
        p.label = b.string("label", p.label);
        p.profile.peak_rate_bps = b.mbps("peak_rate_mbps", p.profile.peak_rate_bps);
        p.profile.period = b.millis("period_ms", p.profile.period);
        p.profile.duty = b.positive("duty", p.profile.duty);
        p.profile.start = b.seconds("start_s", p.profile.start);
        b.finish();
        s.benign_periodic = p;
    }

    if (r.has("defense")) {
        ObjectReader d(r.raw("defense"), "defense");
        auto& c = s.defense;
        c.enabled = d.boolean("enabled", true);
        c.detection_period = d.millis("detection_period_ms", c.detection_period);
        c.th1 = d.number("th1", c.th1);
        c.th2 = d.count("th2", c.th2);
        c.th3_fraction = d.number("th3_fraction", c.th3_fraction);
        c.aggressive_detection = d.boolean("aggressive_detection", c.aggressive_detection);
        c.aggressive_abs = d.number("aggressive_abs", c.aggressive_abs);
        c.aggressive_gap = d.number("aggressive_gap", c.aggressive_gap);
        c.median_floor = d.number("median_floor", c.median_floor);
        if (d.has("block_duration_s")) c.block_duration = d.seconds("block_duration_s", SimTime{});
        const std::string mode = d.string("aggregation", defense::to_string(c.aggregation));
        try {
            c.aggregation = defense::parse_aggregation_mode(mode);
        } catch (const std::invalid_argument&) {
            d.fail("aggregation", "expected per_connection or per_source_address");
        }
        d.finish();
    }

    if (r.has("metrics")) {
        ObjectReader m(r.raw("metrics"), "metrics");
        s.metrics.bin_width = m.millis("bin_ms", s.metrics.bin_width);
        s.metrics.convergence_hold = static_cast<uint32_t>(m.count("convergence_hold", s.metrics.convergence_hold));
        m.finish();
    }

    if (r.has("outputs")) {
        ObjectReader o(r.raw("outputs"), "outputs");
        s.outputs.dir = o.string("dir", s.outputs.dir);
        s.outputs.event_log = o.boolean("event_log", s.outputs.event_log);
        o.finish();
    }

    r.finish();
    s.validate();
    return s;
}

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json j;
    j["name"] = s.name;
    j["duration_s"] = s.duration.seconds();
    j["seed"] = s.seed;
    j["topology"] = {
        {"bottleneck_mbps", mbps_of(s.topology.bottleneck_bps)},
        {"access_mbps", mbps_of(s.topology.access_bps)},
        {"access_delay_ms", s.topology.access_delay.millis()},
        {"bottleneck_delay_ms", s.topology.bottleneck_delay.millis()},
        {"receiver_delay_ms", s.topology.receiver_delay.millis()},
        {"buffer_packets", s.topology.buffer_packets},
    };
    j["tcp"] = {
        {"min_rto_ms", s.tcp.min_rto.millis()},
        {"max_rto_s", s.tcp.max_rto.seconds()},
        {"initial_cwnd", s.tcp.initial_cwnd},
        {"max_cwnd", s.tcp.max_cwnd},
        {"send_buffer_packets", s.tcp.send_buffer_packets},
        {"fast_retransmit", s.tcp.fast_retransmit},
        {"dupack_threshold", s.tcp.dupack_threshold},
    };
    ordered_json legit = ordered_json::array();
    for (const auto& f : s.legitimate) {
        ordered_json e = {{"label", f.label}, {"rate_mbps", mbps_of(f.rate_bps)}, {"start_s", f.start.seconds()}};
        if (f.access_delay) e["access_delay_ms"] = f.access_delay->millis();
        legit.push_back(std::move(e));
    }
    j["legitimate"] = std::move(legit);

    if (s.attack) {
        if (const auto* a = std::get_if<traffic::AttackProfile>(&*s.attack)) {
            ordered_json e;
            e["kind"] = a->kind == traffic::AttackKind::ConstantRate ? "constant_rate" : "low_rate";
            e["rate_mbps"] = mbps_of(a->rate_bps);
            if (a->kind == traffic::AttackKind::LowRateSquareWave) {
                e["period_ms"] = a->period.millis();
                e["burst_ms"] = a->burst.millis();
            }
            e["subflows"] = a->n_subflows;
            e["pacing_jitter"] = a->pacing_jitter;
            e["spoof_sources"] = a->spoof_sources;
            e["start_s"] = a->start.seconds();
            j["attack"] = std::move(e);
        } else {
            const auto& p = std::get<traffic::SstfProfile>(*s.attack);
            j["attack"] = {
                {"kind", "sstf"},
                {"attackers", p.n_attackers},
                {"per_flow_rate_mbps", mbps_of(p.per_flow_rate_bps)},
                {"spawn_interval_ms", p.spawn_interval.millis()},
                {"flow_payload_packets", p.flow_payload},
                {"spoof_sources", p.spoof_sources},
                {"start_s", p.start.seconds()},
            };
        }
    } else {
        j["attack"] = nullptr;
    }

    if (s.benign_periodic) {
        const auto& p = s.benign_periodic->profile;
        j["benign_periodic"] = {
            {"label", s.benign_periodic->label},
            {"peak_rate_mbps", mbps_of(p.peak_rate_bps)},
            {"period_ms", p.period.millis()},
            {"duty", p.duty},
            {"start_s", p.start.seconds()},
        };
    } else {
        j["benign_periodic"] = nullptr;
    }

    const auto& c = s.defense;
    j["defense"] = {
        {"enabled", c.enabled},
        {"detection_period_ms", c.detection_period.millis()},
        {"th1", c.th1},
        {"th2", c.th2},
        {"th3_fraction", c.th3_fraction},
        {"aggressive_detection", c.aggressive_detection},
        {"aggressive_abs", c.aggressive_abs},
        {"aggressive_gap", c.aggressive_gap},
        {"median_floor", c.median_floor},
        {"block_duration_s", c.block_duration ? ordered_json(c.block_duration->seconds()) : ordered_json(nullptr)},
        {"aggregation", defense::to_string(c.aggregation)},
    };
    j["metrics"] = {{"bin_ms", s.metrics.bin_width.millis()}, {"convergence_hold", s.metrics.convergence_hold}};
    j["outputs"] = {{"dir", s.outputs.dir}, {"event_log", s.outputs.event_log}};
    return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path.string() + ": cannot open");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace accflow::harness
