#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "accflow/sim/time.hpp"

namespace accflow::metrics {

using sim::SimTime;

/// Bits delivered to a receiver, binned by delivery time.
class ThroughputSeries {
public:
    ThroughputSeries() = default;
    ThroughputSeries(std::string label, SimTime bin_width, SimTime duration);

    void add(SimTime at, uint64_t bits);

    const std::string& label() const { return label_; }
    SimTime bin_width() const { return bin_width_; }
    const std::vector<uint64_t>& bits() const { return bits_; }
    size_t size() const { return bits_.size(); }
    /// Average rate over bin i, bits/s.
    double rate_bps(size_t i) const;
    uint64_t total_bits() const;

private:
    std::string label_;
    SimTime bin_width_ = SimTime::ms(500);
    std::vector<uint64_t> bits_;
};

/// Delivered bits in [t0, t1) divided by (t1 - t0), in bits/s. Bins that
/// straddle a window edge contribute pro rata. Throws std::invalid_argument
/// when t1 <= t0.
double mean_goodput(const ThroughputSeries& series, SimTime t0, SimTime t1);

}  // namespace accflow::metrics
