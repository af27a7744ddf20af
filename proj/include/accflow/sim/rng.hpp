#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace accflow::sim {

// 64-bit FNV-1a; used to turn stream labels into seed material.
uint64_t fnv1a64(std::string_view s);

// SplitMix64 finalizer.
uint64_t mix64(uint64_t x);

/// A named pseudo-random stream. The value sequence depends only on
/// (seed, stream id, draw index): mt19937_64 output is fixed by the
/// standard and the double conversion below is done by hand rather than
/// through a library distribution.
class RngStream {
public:
    RngStream(uint64_t seed, std::string stream_id);

    uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform();
    /// True with probability p (one draw).
    bool bernoulli(double p) { return uniform() < p; }

    uint64_t seed() const { return seed_; }
    const std::string& id() const { return id_; }
    uint64_t draws() const { return draws_; }

private:
    uint64_t seed_;
    std::string id_;
    std::mt19937_64 engine_;
    uint64_t draws_ = 0;
};

}  // namespace accflow::sim
