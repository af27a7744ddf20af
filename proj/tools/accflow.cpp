#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "accflow/harness/batch.hpp"
#include "accflow/harness/output.hpp"
#include "accflow/harness/presets.hpp"
#include "accflow/harness/simulation.hpp"

namespace fs = std::filesystem;
using namespace accflow;

namespace {

void print_summary(const metrics::RunReport& r) {
    const sim::SimTime t0 = metrics::steady_state_start(r);
    std::printf("%-14s %-11s %9s %9s %8s\n", "flow", "role", "desired", "goodput", "timeouts");
    for (const auto& f : r.flows) {
        const double g = t0 < r.duration ? metrics::mean_goodput(f.series, t0, r.duration) / 1e6 : 0.0;
        std::printf("%-14s %-11s %9.3f %9.3f %8llu\n", f.label.c_str(), metrics::to_string(f.role),
                    static_cast<double>(f.desired_rate_bps) / 1e6, g, static_cast<unsigned long long>(f.timeouts));
    }
    std::printf("goodput window starts at %.1f s\n", t0.seconds());
    if (r.attack_start) {
        if (r.convergence_time) {
            std::printf("convergence: %.1f s after attack start\n", (*r.convergence_time - *r.attack_start).seconds());
        } else {
            std::printf("convergence: not reached\n");
        }
    }
}

int execute(harness::Scenario s, const std::optional<std::string>& out_dir, bool events) {
    if (out_dir) s.outputs.dir = *out_dir;
    if (events) s.outputs.event_log = true;
    const fs::path dir = s.outputs.dir.empty() ? fs::path("out") / s.name : fs::path(s.outputs.dir);
    fs::create_directories(dir);

    metrics::RunReport report;
    if (s.outputs.event_log) {
        harness::AtomicFile log(dir / "events.log");
        report = harness::run_scenario(s, {&log.stream()});
        log.commit();
    } else {
        report = harness::run_scenario(s);
    }
    harness::write_run_outputs(report, dir);
    print_summary(report);
    std::printf("outputs written to %s\n", dir.string().c_str());
    return 0;
}

std::optional<bool> on_off(const std::string& v) {
    if (v.empty()) return std::nullopt;
    if (v == "on") return true;
    if (v == "off") return false;
    throw harness::ScenarioError("--defense: expected on or off");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rate TCP DoS dumbbell simulator with the AccFlow defense"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<std::string> out_dir;
    bool events = false;
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--events", events, "Also write events.log");

    std::string preset_name;
    std::optional<uint32_t> attackers;
    std::optional<double> rate;
    std::string defense;
    std::optional<uint64_t> seed;
    std::optional<uint32_t> flows;
    bool list = false;
    auto* preset = app.add_subcommand("preset", "Run a built-in experiment");
    preset->add_option("name", preset_name, "Preset name");
    preset->add_option("--attackers", attackers, "Attacking flows / SSTF attackers");
    preset->add_option("--rate", rate, "Aggregate attack rate, Mbps");
    preset->add_option("--defense", defense, "on|off")->check(CLI::IsMember({"on", "off"}));
    preset->add_option("--seed", seed, "Random seed");
    preset->add_option("--flows", flows, "Number of normal flows");
    preset->add_option("--out", out_dir, "Output directory");
    preset->add_flag("--events", events, "Also write events.log");
    preset->add_flag("--list", list, "List preset names");

    std::string sweep_preset;
    std::string axis;
    harness::SweepSpec spec;
    auto* sweep = app.add_subcommand("sweep", "Run a preset over a range of attackers or rates");
    sweep->add_option("preset", sweep_preset, "Preset name")->required();
    sweep->add_option("--axis", axis, "attackers|rate")->required()->check(CLI::IsMember({"attackers", "rate"}));
    sweep->add_option("--from", spec.from, "First value")->required();
    sweep->add_option("--to", spec.to, "Last value")->required();
    sweep->add_option("--step", spec.step, "Step")->required();
    sweep->add_option("--defense", defense, "on|off")->check(CLI::IsMember({"on", "off"}));
    sweep->add_option("--seed", seed, "Seed of the first point");
    sweep->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return execute(harness::load_scenario(scenario_path), out_dir, events);

        if (*preset) {
            if (list || preset_name.empty()) {
                for (const auto& n : harness::preset_names()) std::printf("%s\n", n.c_str());
                return preset_name.empty() && !list ? 2 : 0;
            }
            harness::PresetOptions o{attackers, rate, on_off(defense), seed, flows};
            return execute(harness::make_preset(preset_name, o), out_dir, events);
        }

        if (*sweep) {
            spec.axis = harness::parse_sweep_axis(axis);
            harness::PresetOptions base;
            base.defense = on_off(defense);
            base.seed = seed;
            const auto values = harness::sweep_values(spec);
            const auto scenarios = harness::sweep_scenarios(sweep_preset, base, spec);
            const auto reports = harness::run_batch(scenarios);

            const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path("out") / ("sweep-" + sweep_preset);
            std::vector<harness::SweepRow> rows;
            for (size_t i = 0; i < reports.size(); ++i) {
                harness::write_run_outputs(reports[i], dir / ("point-" + std::to_string(i)));
                rows.push_back(harness::summarize_point(i, spec.axis, values[i], scenarios[i], reports[i]));
            }
            fs::create_directories(dir);
            harness::AtomicFile csv(dir / "summary.csv");
            harness::write_sweep_csv(csv.stream(), rows);
            csv.commit();
            harness::write_sweep_csv(std::cout, rows);
            return 0;
        }
    } catch (const harness::ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const harness::InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
