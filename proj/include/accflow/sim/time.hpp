#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>

namespace accflow::sim {

/// Simulated time with microsecond resolution, counted from run start.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime us(uint64_t n) { return SimTime(n); }
    static constexpr SimTime ms(uint64_t n) { return SimTime(n * 1000); }
    static constexpr SimTime sec(uint64_t n) { return SimTime(n * 1000000); }
    static constexpr SimTime max() { return SimTime(UINT64_MAX); }

    /// Rounds to the nearest microsecond; negative input is rejected.
    static SimTime from_seconds(double s) {
        if (!(s >= 0.0)) throw std::invalid_argument("negative or NaN time");
        return SimTime(static_cast<uint64_t>(s * 1e6 + 0.5));
    }
    static SimTime from_millis(double ms) { return from_seconds(ms / 1e3); }

    constexpr uint64_t count() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }
    constexpr double millis() const { return static_cast<double>(us_) / 1e3; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime(us_ + o.us_); }
    constexpr SimTime& operator+=(SimTime o) { us_ += o.us_; return *this; }
    constexpr SimTime operator-(SimTime o) const {
        if (o.us_ > us_) throw std::logic_error("SimTime underflow");
        return SimTime(us_ - o.us_);
    }
    constexpr SimTime operator*(uint64_t k) const { return SimTime(us_ * k); }
    constexpr uint64_t operator/(SimTime o) const { return us_ / o.us_; }
    constexpr SimTime operator%(SimTime o) const { return SimTime(us_ % o.us_); }

private:
    constexpr explicit SimTime(uint64_t us) : us_(us) {}
    uint64_t us_ = 0;
};

/// Serialization time of `bytes` on a link of `bits_per_second`, rounded up.
constexpr SimTime serialization_time(uint64_t bytes, uint64_t bits_per_second) {
    return SimTime::us((bytes * 8 * 1000000 + bits_per_second - 1) / bits_per_second);
}

}  // namespace accflow::sim
