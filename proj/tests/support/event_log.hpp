#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Independent re-reading of events.log. Nothing here calls into the library:
// keys, bins and counts are rebuilt from the text alone.
namespace accflow::testing {

struct LogLine {
    uint64_t time_us = 0;
    uint64_t seq = 0;
    std::string kind;
    uint32_t flow = 0;  // 0 for '-'
    std::string detail;

    /// Value of `name=` inside detail, or empty.
    std::string_view field(std::string_view name) const;
};

std::vector<LogLine> parse_log(const std::string& text);

struct KeyCount {
    uint64_t usage = 0;
    uint64_t drops = 0;
    uint64_t defense_drops = 0;
};

struct ScannedPeriod {
    uint64_t index = 0;
    uint64_t arrivals = 0;
    uint64_t drops = 0;
    uint64_t defense_drops = 0;
    /// "conn:<id>" or "src:<dotted>".
    std::map<std::string, KeyCount> keys;
};

struct Scan {
    std::vector<ScannedPeriod> periods;
    /// label -> delivered bits per bin (first copies of data only).
    std::map<std::string, std::vector<uint64_t>> bins;
    /// flow id -> transmissions.
    std::map<uint32_t, uint64_t> emissions;
    uint64_t lines = 0;
    uint64_t max_occupancy = 0;
};

Scan scan_log(const std::vector<LogLine>& lines, bool per_source, uint64_t bin_us);

}  // namespace accflow::testing
