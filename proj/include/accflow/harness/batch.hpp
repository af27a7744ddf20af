#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "accflow/harness/presets.hpp"
#include "accflow/harness/scenario.hpp"
#include "accflow/metrics/report.hpp"

namespace accflow::harness {

/// Runs every scenario; independent runs are spread over OpenMP threads.
/// Result i belongs to scenario i regardless of thread count.
std::vector<metrics::RunReport> run_batch(const std::vector<Scenario>& scenarios);

/// Same results as run_batch, computed one after another on the calling thread.
std::vector<metrics::RunReport> run_batch_serial(const std::vector<Scenario>& scenarios);

enum class SweepAxis { Attackers, Rate };

SweepAxis parse_sweep_axis(const std::string& s);
const char* to_string(SweepAxis axis);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Attackers;
    double from = 1;
    double to = 50;
    double step = 1;
};

/// Axis values from, from+step, ... up to and including `to`. Throws
/// ScenarioError when the range is empty or the step is not positive.
std::vector<double> sweep_values(const SweepSpec& spec);

/// One scenario per axis value; point i gets seed base_seed + i.
std::vector<Scenario> sweep_scenarios(const std::string& preset, const PresetOptions& base, const SweepSpec& spec);

struct SweepRow {
    size_t index = 0;
    SweepAxis axis = SweepAxis::Attackers;
    double value = 0;
    uint64_t seed = 0;
    /// Mean steady-state goodput over the legitimate flows, Mbps.
    double legit_goodput_mbps = 0;
    /// Smallest steady-state goodput / desired rate over the legitimate flows.
    double min_goodput_ratio = 0;
    std::optional<double> convergence_time_s;
    double mean_aggregate_loss = 0;
};

SweepRow summarize_point(size_t index, SweepAxis axis, double value, const Scenario& scenario,
                         const metrics::RunReport& report);

/// `index,axis,value,seed,legit_goodput_mbps,min_goodput_ratio,convergence_time_s,mean_aggregate_loss`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace accflow::harness
