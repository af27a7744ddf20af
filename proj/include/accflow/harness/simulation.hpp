#pragma once

#include <ostream>
#include <stdexcept>

#include "accflow/harness/scenario.hpp"
#include "accflow/metrics/report.hpp"

namespace accflow::harness {

/// An internal consistency check failed during a run (packet conservation,
/// occupancy bound, ULR identity). The CLI maps this to a nonzero exit.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct RunOptions {
    /// When set, every dispatched event is written here as one text line.
    std::ostream* event_log = nullptr;
};

/// Builds the dumbbell for `scenario`, runs it to scenario.duration and
/// collects the report. Deterministic in (scenario, seed).
metrics::RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Host addresses used by the dumbbell builder.
net::Address legitimate_address(size_t index);
net::Address attacker_address(const traffic::AttackProfile& profile, uint32_t subflow);
net::Address periodic_address();

}  // namespace accflow::harness
