// Runs every acceptance scenario once (in parallel) and prints one PASS/FAIL
// line per criterion. Exit status is nonzero if any criterion fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "accflow/harness/batch.hpp"
#include "accflow/harness/output.hpp"
#include "accflow/harness/presets.hpp"
#include "accflow/harness/simulation.hpp"
#include "checks.hpp"

using namespace accflow;
using namespace accflow::harness;
using metrics::FlowRole;
using metrics::RunReport;
using sim::SimTime;

namespace {

struct Case {
    std::string tag;
    Scenario scenario;
};

std::vector<Case> cases;

size_t add(const std::string& preset, PresetOptions o = {}) {
    std::ostringstream tag;
    tag << preset;
    if (o.attackers) tag << " attackers=" << *o.attackers;
    if (o.rate_mbps) tag << " rate=" << *o.rate_mbps;
    if (o.flows) tag << " flows=" << *o.flows;
    if (o.defense) tag << " defense=" << (*o.defense ? "on" : "off");
    cases.push_back({tag.str(), make_preset(preset, o)});
    return cases.size() - 1;
}

PresetOptions with_attackers(uint32_t n) {
    PresetOptions o;
    o.attackers = n;
    return o;
}

PresetOptions with_rate(double mbps) {
    PresetOptions o;
    o.rate_mbps = mbps;
    return o;
}

double legit_goodput(const RunReport& r, const metrics::FlowReport& f, SimTime from) {
    return metrics::mean_goodput(f.series, from, r.duration);
}

std::vector<const metrics::FlowReport*> legit(const RunReport& r) {
    std::vector<const metrics::FlowReport*> out;
    for (const auto& f : r.flows)
        if (f.role == FlowRole::Legitimate) out.push_back(&f);
    return out;
}

/// Smallest post-convergence goodput / desired rate.
double min_ratio(const RunReport& r) {
    const SimTime t0 = metrics::steady_state_start(r);
    double worst = 1e9;
    for (const auto* f : legit(r)) {
        worst = std::min(worst, legit_goodput(r, *f, t0) / static_cast<double>(f->desired_rate_bps));
    }
    return worst;
}

std::string fmt(double v, int prec = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

int failures = 0;

void verdict(int n, const std::string& title, bool ok, const std::string& measured) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << n << " (" << title << "): " << measured << std::endl;
    if (!ok) ++failures;
}

}  // namespace

int main() {
    const size_t baseline = add("baseline");
    const size_t attacked = add("baseline-attack");
    const size_t normal40 = add("normal-40");

    std::vector<size_t> low_rate, general;
    for (uint32_t n : {1u, 10u, 30u, 50u}) {
        low_rate.push_back(add("setting-one", with_attackers(n)));
        low_rate.push_back(add("setting-two", with_attackers(n)));
        general.push_back(add("general-dos-one", with_attackers(n)));
        general.push_back(add("general-dos-two", with_attackers(n)));
    }
    for (double r : {20.0, 40.0, 60.0}) {
        low_rate.push_back(add("setting-three", with_rate(r)));
        general.push_back(add("general-dos-three", with_rate(r)));
    }
    const size_t spot[] = {add("setting-one", with_attackers(20)), add("setting-two", with_attackers(30)),
                           add("setting-three", with_rate(40))};

    PresetOptions off;
    off.defense = false;
    const size_t sstf_on = add("sstf");
    const size_t sstf_off = add("sstf", off);

    std::vector<std::pair<size_t, size_t>> benign;  // (on, off)
    for (uint32_t n : {5u, 9u, 15u, 20u}) {
        PresetOptions o;
        o.flows = n;
        const size_t on = add("benign-periodic", o);
        o.defense = false;
        benign.emplace_back(on, add("benign-periodic", o));
    }

    std::vector<Scenario> scenarios;
    for (const auto& c : cases) scenarios.push_back(c.scenario);
    std::cout << "running " << scenarios.size() << " scenarios" << std::endl;
    std::vector<RunReport> reports;
    try {
        reports = run_batch(scenarios);
    } catch (const std::exception& e) {
        std::cout << "FAIL  run aborted: " << e.what() << std::endl;
        return 1;
    }

    // 1
    {
        const RunReport& r = reports[baseline];
        double lo = 1e9, hi = 0;
        for (const auto* f : legit(r)) {
            const double g = legit_goodput(r, *f, metrics::steady_state_start(r)) / 1e6;
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
        verdict(1, "baseline fairness", lo >= 0.9 && hi <= 1.1,
                "goodput range [" + fmt(lo) + ", " + fmt(hi) + "] Mbps, need [0.9, 1.1]");
    }

    // 2
    {
        const RunReport& r = reports[attacked];
        double worst = 0;
        for (const auto* f : legit(r)) worst = std::max(worst, legit_goodput(r, *f, *r.attack_start) / 1e6);
        verdict(2, "attack effectiveness", worst <= 0.15,
                "max legitimate goodput after attack start " + fmt(worst) + " Mbps, need <= 0.15");
    }

    // 3
    {
        const RunReport& n = reports[normal40];
        size_t calm = 0;
        for (const auto& p : n.periods) calm += p.aggregate_loss < 0.10;
        const double calm_frac = static_cast<double>(calm) / n.periods.size();

        const RunReport& a = reports[attacked];
        size_t high = 0, total = 0;
        double sum = 0;
        for (const auto& p : a.periods) {
            if (p.start < *a.attack_start) continue;
            ++total;
            high += p.aggregate_loss > 0.50;
            sum += p.aggregate_loss;
        }
        const double high_frac = static_cast<double>(high) / total;
        verdict(3, "aggregate-loss separation", calm_frac >= 0.90 && high_frac > 0.5,
                "normal-40: " + fmt(calm_frac) + " of periods below 0.10 (need >= 0.90); attacked: " +
                    fmt(high_frac) + " of periods above 0.50 (need > 0.5), mean " + fmt(sum / total));
    }

    // 4
    {
        bool ok = true;
        std::string worst_tag;
        double worst = 1e9;
        for (size_t i : low_rate) {
            const double m = min_ratio(reports[i]);
            ok = ok && m >= 0.85;
            if (m < worst) {
                worst = m;
                worst_tag = cases[i].tag;
            }
        }
        verdict(4, "low-rate defense efficacy", ok,
                "worst goodput/desired " + fmt(worst) + " (" + worst_tag + "), need >= 0.85 over " +
                    std::to_string(low_rate.size()) + " runs");
    }

    // 5
    {
        bool ok = true;
        std::string detail;
        for (size_t i : spot) {
            const RunReport& r = reports[i];
            const bool has = r.convergence_time.has_value();
            const double dt = has ? (*r.convergence_time - *r.attack_start).seconds() : -1;
            ok = ok && has && dt <= 60.0;
            detail += (detail.empty() ? "" : "; ") + cases[i].tag + " " + (has ? fmt(dt, 1) + " s" : "none");
        }
        verdict(5, "convergence", ok, detail + ", need <= 60 s");
    }

    // 6
    {
        const RunReport& roff = reports[sstf_off];
        const auto flows_off = legit(roff);
        const double fair = static_cast<double>(cases[sstf_off].scenario.topology.bottleneck_bps) / flows_off.size();
        double off_max = 0;
        for (const auto* f : flows_off) off_max = std::max(off_max, legit_goodput(roff, *f, *roff.attack_start) / fair);

        const RunReport& ron = reports[sstf_on];
        const SimTime t0 = metrics::steady_state_start(ron);
        bool on_ok = true;
        double on_worst = 1e9;
        for (const auto* f : legit(ron)) {
            const double need = (f->desired_rate_bps == 900'000 || f->desired_rate_bps == 1'100'000) ? 0.80 : 0.85;
            const double ratio = legit_goodput(ron, *f, t0) / static_cast<double>(f->desired_rate_bps);
            on_ok = on_ok && ratio >= need;
            on_worst = std::min(on_worst, ratio);
        }
        const std::string conv =
            ron.convergence_time ? fmt((*ron.convergence_time - *ron.attack_start).seconds(), 1) + " s" : "none";
        verdict(6, "SSTF defense", off_max <= 0.25 && on_ok,
                "defense off: max goodput/fair share " + fmt(off_max) + " (need <= 0.25); defense on: worst " +
                    "goodput/desired " + fmt(on_worst) + " (need >= 0.85, 0.80 for 0.9/1.1 Mbps), convergence " +
                    conv);
    }

    // 7
    {
        double worst = 0;
        std::string worst_tag;
        for (auto [on, off_i] : benign) {
            const RunReport& a = reports[on];
            const RunReport& b = reports[off_i];
            for (size_t k = 0; k < a.flows.size(); ++k) {
                const double ga = legit_goodput(a, a.flows[k], metrics::steady_state_start(a));
                const double gb = legit_goodput(b, b.flows[k], metrics::steady_state_start(b));
                const double rel = std::abs(ga - gb) / gb;
                if (rel > worst) {
                    worst = rel;
                    worst_tag = cases[on].tag + " " + a.flows[k].label;
                }
            }
        }
        verdict(7, "benign coexistence", worst <= 0.05,
                "largest on/off goodput difference " + fmt(100 * worst, 2) + "%" +
                    (worst_tag.empty() ? "" : " (" + worst_tag + ")") + ", need <= 5%");
    }

    // 8
    {
        bool ok = true;
        std::string below;
        double worst = 1e9;
        for (size_t i : general) {
            const double m = min_ratio(reports[i]);
            worst = std::min(worst, m);
            if (m < 0.85) {
                ok = false;
                below += (below.empty() ? "" : ", ") + cases[i].tag + " " + fmt(m);
            }
        }
        verdict(8, "general DoS", ok,
                "worst goodput/desired " + fmt(worst) + ", need >= 0.85 over " + std::to_string(general.size()) +
                    " runs" + (below.empty() ? "" : "; below: " + below));
    }

    // 9
    {
        size_t violations = 0, periods = 0;
        std::string first;
        for (size_t i = 0; i < reports.size(); ++i) {
            const auto v = testing::defense_invariant_violations(reports[i], cases[i].scenario.defense);
            periods += reports[i].periods.size();
            if (!v.empty() && first.empty()) first = cases[i].tag + ": " + v.front();
            violations += v.size();
        }
        verdict(9, "algebraic identities", violations == 0,
                std::to_string(violations) + " violations over " + std::to_string(periods) + " periods" +
                    (first.empty() ? "" : "; first: " + first));
    }

    // 10 and 11 share the logged reruns.
    std::mt19937_64 pick(20240611);
    std::vector<size_t> chosen;
    while (chosen.size() < 3) {
        const size_t i = std::uniform_int_distribution<size_t>(0, cases.size() - 1)(pick);
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
    }
    {
        size_t mismatches = 0;
        std::string detail, first;
        for (size_t i : chosen) {
            std::string log;
            const RunReport again = testing::run_logged(cases[i].scenario, log);
            const auto m = testing::recount_mismatches(again, log, cases[i].scenario);
            mismatches += m.size();
            if (!m.empty() && first.empty()) first = m.front();
            detail += (detail.empty() ? "" : ", ") + cases[i].tag;
        }
        verdict(10, "oracle recounts", mismatches == 0,
                std::to_string(mismatches) + " mismatches in [" + detail + "]" +
                    (first.empty() ? "" : "; first: " + first));
    }
    {
        std::vector<Scenario> again;
        for (size_t i : chosen) again.push_back(cases[i].scenario);
        again.push_back(cases[sstf_on].scenario);
        const auto rerun = run_batch_serial(again);
        size_t differ = 0;
        for (size_t k = 0; k < rerun.size(); ++k) {
            const size_t i = k < chosen.size() ? chosen[k] : sstf_on;
            differ += report_json_text(rerun[k]) != report_json_text(reports[i]);
        }
        verdict(11, "determinism", differ == 0,
                std::to_string(differ) + " of " + std::to_string(rerun.size()) +
                    " repeated runs changed report.json bytes");
    }

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
