#include "accflow/harness/batch.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>

#include "accflow/harness/simulation.hpp"

namespace accflow::harness {

std::vector<metrics::RunReport> run_batch_serial(const std::vector<Scenario>& scenarios) {
    std::vector<metrics::RunReport> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios) out.push_back(run_scenario(s));
    return out;
}

std::vector<metrics::RunReport> run_batch(const std::vector<Scenario>& scenarios) {
    const auto n = static_cast<long>(scenarios.size());
    std::vector<metrics::RunReport> out(scenarios.size());
    std::vector<std::exception_ptr> errors(scenarios.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = run_scenario(scenarios[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "attackers") return SweepAxis::Attackers;
    if (s == "rate") return SweepAxis::Rate;
    throw ScenarioError("sweep axis: expected attackers or rate, got '" + s + "'");
}

const char* to_string(SweepAxis axis) { return axis == SweepAxis::Attackers ? "attackers" : "rate"; }

std::vector<double> sweep_values(const SweepSpec& spec) {
    if (!(spec.step > 0.0)) throw ScenarioError("sweep: step must be positive");
    if (!(spec.from <= spec.to)) throw ScenarioError("sweep: empty axis (from > to)");
    std::vector<double> v;
    const double eps = spec.step * 1e-9;
    for (size_t i = 0;; ++i) {
        const double x = spec.from + static_cast<double>(i) * spec.step;
        if (x > spec.to + eps) break;
        v.push_back(x);
    }
    return v;
}

std::vector<Scenario> sweep_scenarios(const std::string& preset, const PresetOptions& base, const SweepSpec& spec) {
    const uint64_t seed0 = base.seed.value_or(make_preset(preset, base).seed);
    std::vector<Scenario> out;
    const auto values = sweep_values(spec);
    for (size_t i = 0; i < values.size(); ++i) {
        PresetOptions o = base;
        if (spec.axis == SweepAxis::Attackers) {
            const double v = values[i];
            if (v < 1 || std::floor(v) != v) throw ScenarioError("sweep: attacker counts must be whole numbers >= 1");
            o.attackers = static_cast<uint32_t>(v);
        } else {
            o.rate_mbps = values[i];
        }
        o.seed = seed0 + i;
        out.push_back(make_preset(preset, o));
    }
    return out;
}

SweepRow summarize_point(size_t index, SweepAxis axis, double value, const Scenario& scenario,
                         const metrics::RunReport& report) {
    SweepRow row;
    row.index = index;
    row.axis = axis;
    row.value = value;
    row.seed = scenario.seed;
    const SimTime t0 = metrics::steady_state_start(report);
    double sum = 0;
    size_t n = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& f : report.flows) {
        if (f.role != metrics::FlowRole::Legitimate) continue;
        const double g = t0 < report.duration ? metrics::mean_goodput(f.series, t0, report.duration) : 0.0;
        sum += g;
        ++n;
        min_ratio = std::min(min_ratio, g / static_cast<double>(f.desired_rate_bps));
    }
    row.legit_goodput_mbps = n ? sum / static_cast<double>(n) / 1e6 : 0.0;
    row.min_goodput_ratio = n ? min_ratio : 0.0;
    if (report.convergence_time && report.attack_start) {
        row.convergence_time_s = (*report.convergence_time - *report.attack_start).seconds();
    }
    double loss = 0;
    size_t periods = 0;
    for (const auto& p : report.periods) {
        if (report.attack_start && p.start < *report.attack_start) continue;
        loss += p.aggregate_loss;
        ++periods;
    }
    row.mean_aggregate_loss = periods ? loss / static_cast<double>(periods) : 0.0;
    return row;
}

namespace {

std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "index,axis,value,seed,legit_goodput_mbps,min_goodput_ratio,convergence_time_s,mean_aggregate_loss\n";
    for (const auto& r : rows) {
        out << r.index << ',' << to_string(r.axis) << ',' << num(r.value) << ',' << r.seed << ','
            << num(r.legit_goodput_mbps) << ',' << num(r.min_goodput_ratio) << ','
            << (r.convergence_time_s ? num(*r.convergence_time_s) : std::string()) << ','
            << num(r.mean_aggregate_loss) << '\n';
    }
}

}  // namespace accflow::harness
