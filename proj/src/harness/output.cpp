#include "accflow/harness/output.hpp"

#include <sstream>
#include <stdexcept>

namespace accflow::harness {

AtomicFile::AtomicFile(std::filesystem::path target) : target_(std::move(target)) {
    temp_ = target_;
    temp_ += ".tmp";
    out_.open(temp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open " + temp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(temp_, ec);
    }
}

void AtomicFile::commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + temp_.string());
    out_.close();
    std::filesystem::rename(temp_, target_);
    committed_ = true;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    AtomicFile f(path);
    f.stream() << text;
    f.commit();
}

std::string report_json_text(const metrics::RunReport& report) {
    return metrics::report_to_json(report).dump(2) + "\n";
}

void write_run_outputs(const metrics::RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        AtomicFile f(dir / "throughput.csv");
        metrics::write_throughput_csv(f.stream(), report);
        f.commit();
    }
    {
        AtomicFile f(dir / "periods.csv");
        metrics::write_periods_csv(f.stream(), report);
        f.commit();
    }
    write_text_atomic(dir / "report.json", report_json_text(report));
}

}  // namespace accflow::harness
