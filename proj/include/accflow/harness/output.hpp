#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "accflow/metrics/report.hpp"

namespace accflow::harness {

/// A file written under a temporary name and renamed into place on commit().
/// An uncommitted file is removed on destruction.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path target);
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;
    ~AtomicFile();

    std::ofstream& stream() { return out_; }
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::ofstream out_;
    bool committed_ = false;
};

void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// throughput.csv, periods.csv and report.json under `dir` (created if missing).
void write_run_outputs(const metrics::RunReport& report, const std::filesystem::path& dir);

std::string report_json_text(const metrics::RunReport& report);

}  // namespace accflow::harness
