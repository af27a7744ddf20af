#include "accflow/metrics/series.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace accflow::metrics {

ThroughputSeries::ThroughputSeries(std::string label, SimTime bin_width, SimTime duration)
    : label_(std::move(label)), bin_width_(bin_width) {
    if (bin_width.count() == 0) throw std::invalid_argument("bin width must be positive");
    bits_.assign((duration.count() + bin_width.count() - 1) / bin_width.count(), 0);
}

void ThroughputSeries::add(SimTime at, uint64_t bits) {
    const size_t bin = at / bin_width_;
    if (bin >= bits_.size()) bits_.resize(bin + 1, 0);
    bits_[bin] += bits;
}

double ThroughputSeries::rate_bps(size_t i) const {
    return static_cast<double>(bits_.at(i)) / bin_width_.seconds();
}

uint64_t ThroughputSeries::total_bits() const { return std::accumulate(bits_.begin(), bits_.end(), uint64_t{0}); }

double mean_goodput(const ThroughputSeries& series, SimTime t0, SimTime t1) {
    if (t1 <= t0) throw std::invalid_argument("mean_goodput: empty window");
    const uint64_t w = series.bin_width().count();
    double bits = 0.0;
    for (size_t i = 0; i < series.size(); ++i) {
        const uint64_t lo = i * w;
        const uint64_t hi = lo + w;
        const uint64_t a = std::max(lo, t0.count());
        const uint64_t b = std::min(hi, t1.count());
        if (b <= a) continue;
        if (a == lo && b == hi) {
            bits += static_cast<double>(series.bits()[i]);
        } else {
            bits += static_cast<double>(series.bits()[i]) * static_cast<double>(b - a) / static_cast<double>(w);
        }
    }
    return bits / (t1 - t0).seconds();
}

}  // namespace accflow::metrics
