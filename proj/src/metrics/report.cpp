#include "accflow/metrics/report.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace accflow::metrics {

const char* to_string(FlowRole role) {
    switch (role) {
    case FlowRole::Legitimate: return "legitimate";
    case FlowRole::Attacker: return "attacker";
    case FlowRole::Periodic: return "periodic";
    }
    return "unknown";
}

const FlowReport* RunReport::find_flow(const std::string& label) const {
    for (const auto& f : flows) {
        if (f.label == label) return &f;
    }
    return nullptr;
}

std::optional<SimTime> convergence_time(const RunReport& report, SimTime attack_start, uint32_t hold) {
    if (hold == 0) hold = 1;
    std::vector<defense::FlowKey> legit;
    for (const auto& f : report.flows) {
        if (f.role == FlowRole::Legitimate) legit.insert(legit.end(), f.keys.begin(), f.keys.end());
    }
    // Clean: no legitimate drops and at least one legitimate arrival.
    auto clean = [&](const defense::PeriodSnapshot& p) {
        bool active = legit.empty();
        for (const auto& key : legit) {
            const defense::FlowStats* st = p.find(key);
            if (st == nullptr) continue;
            if (st->drops > 0) return false;
            active = active || st->usage > 0;
        }
        return active;
    };

    uint32_t run = 0;
    for (size_t i = 0; i < report.periods.size(); ++i) {
        const auto& p = report.periods[i];
        if (p.start < attack_start) continue;
        run = clean(p) ? run + 1 : 0;
        if (run == hold) return report.periods[i + 1 - hold].start;
    }
    return std::nullopt;
}

SimTime steady_state_start(const RunReport& report, SimTime warmup) {
    if (report.attack_start) return report.convergence_time.value_or(*report.attack_start);
    return std::min(warmup, SimTime::us(report.duration.count() / 2));
}

namespace {

using nlohmann::ordered_json;

std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

ordered_json optional_seconds(const std::optional<SimTime>& t) {
    return t ? ordered_json(t->seconds()) : ordered_json(nullptr);
}

ordered_json keys_json(const auto& keys) {
    ordered_json a = ordered_json::array();
    for (const auto& k : keys) a.push_back(defense::to_string(k));
    return a;
}

}  // namespace

ordered_json report_to_json(const RunReport& r) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["duration_s"] = r.duration.seconds();
    j["attack_start_s"] = optional_seconds(r.attack_start);
    j["convergence_time_s"] = optional_seconds(r.convergence_time);
    j["events_dispatched"] = r.events_dispatched;
    j["early_drop_draws"] = r.early_drop_draws;

    ordered_json flows = ordered_json::array();
    for (const auto& f : r.flows) {
        ordered_json e;
        e["label"] = f.label;
        e["role"] = to_string(f.role);
        e["desired_rate_mbps"] = static_cast<double>(f.desired_rate_bps) / 1e6;
        e["keys"] = keys_json(f.keys);
        e["connections"] = f.connections;
        e["emitted"] = f.emitted;
        e["delivered"] = f.delivered;
        e["dropped_tail"] = f.dropped_tail;
        e["dropped_defense"] = f.dropped_defense;
        e["timeouts"] = f.timeouts;
        e["mean_goodput_mbps"] = r.duration.count() > 0 ? mean_goodput(f.series, SimTime{}, r.duration) / 1e6 : 0.0;
        e["bin_s"] = f.series.bin_width().seconds();
        ordered_json bins = ordered_json::array();
        for (size_t i = 0; i < f.series.size(); ++i) bins.push_back(f.series.rate_bps(i) / 1e6);
        e["throughput_mbps"] = std::move(bins);
        flows.push_back(std::move(e));
    }
    j["flows"] = std::move(flows);

    ordered_json periods = ordered_json::array();
    for (const auto& p : r.periods) {
        ordered_json e;
        e["index"] = p.index;
        e["start_s"] = p.start.seconds();
        e["end_s"] = p.end.seconds();
        e["arrivals"] = p.arrivals;
        e["drops"] = p.drops;
        e["defense_drops"] = p.defense_drops;
        e["aggregate_loss"] = p.aggregate_loss;
        e["blocked"] = keys_json(p.blocked);
        e["newly_blocked"] = keys_json(p.newly_blocked);
        ordered_json stats = ordered_json::object();
        for (const auto& [key, st] : p.flows) {
            stats[defense::to_string(key)] = {
                {"usage", st.usage},         {"drops", st.drops},   {"defense_drops", st.defense_drops},
                {"loss_rate", st.loss_rate}, {"usage_rate", st.usage_rate}, {"ulr", st.ulr},
            };
        }
        e["flows"] = std::move(stats);
        periods.push_back(std::move(e));
    }
    j["periods"] = std::move(periods);
    return j;
}

void write_throughput_csv(std::ostream& out, const RunReport& r) {
    out << "time_s,flow_label,mbps\n";
    size_t bins = 0;
    for (const auto& f : r.flows) bins = std::max(bins, f.series.size());
    for (size_t i = 0; i < bins; ++i) {
        for (const auto& f : r.flows) {
            if (i >= f.series.size()) continue;
            const double t = static_cast<double>((f.series.bin_width() * i).count()) / 1e6;
            out << num(t) << ',' << f.label << ',' << num(f.series.rate_bps(i) / 1e6) << '\n';
        }
    }
}

void write_periods_csv(std::ostream& out, const RunReport& r) {
    out << "period_index,key,usage,drops,loss_rate,usage_rate,ulr,aggregate_loss,blocked\n";
    for (const auto& p : r.periods) {
        std::set<defense::FlowKey> keys(p.blocked.begin(), p.blocked.end());
        for (const auto& [key, st] : p.flows) keys.insert(key);
        for (const auto& key : keys) {
            const defense::FlowStats* st = p.find(key);
            const defense::FlowStats zero;
            const defense::FlowStats& s = st ? *st : zero;
            out << p.index << ',' << defense::to_string(key) << ',' << s.usage << ',' << s.drops << ','
                << num(s.loss_rate) << ',' << num(s.usage_rate) << ',' << num(s.ulr) << ',' << num(p.aggregate_loss)
                << ',' << (p.blocked.contains(key) ? 1 : 0) << '\n';
        }
    }
}

}  // namespace accflow::metrics
