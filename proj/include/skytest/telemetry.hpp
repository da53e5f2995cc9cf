#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "skytest/expected.hpp"

namespace skytest {

// Emission order within one timestamp is this enumeration order.
enum class Channel {
    Fault,
    GpsFix,
    RangeRead,
    MarkerObs,
    MarkerEst,
    Phase,
    CmdIssue,
    CmdDeliver,
    Collision,
    Touchdown,
    TruthPose,
};

const char* channel_name(Channel c);
bool channel_from_name(const std::string& name, Channel& out);

// Doubles serialize as f:<16 hex> of the IEEE-754 bit pattern; integers as
// decimal; everything else is a bare token.
using Value = std::variant<double, std::int64_t, std::string>;

struct TelemetryRecord {
    std::uint64_t t_us = 0;
    Channel channel = Channel::TruthPose;
    std::vector<std::pair<std::string, Value>> payload;
};

struct LogHeader {
    int version = 1;
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint64_t scnhash = 0;
};

struct TelemetryLog {
    LogHeader header;
    std::vector<TelemetryRecord> records;
};

// Serialization round-trips exactly; float bit patterns survive.
std::string serialize_log(const TelemetryLog& log);
std::string serialize_record(const TelemetryRecord& r);

struct LogError {
    std::size_t record_index = 0;  // 0-based; header faults report 0
    std::string message;
};

Expected<TelemetryLog, LogError> parse_log(const std::string& text);
Expected<TelemetryLog, LogError> read_log_file(const std::string& path);
bool write_log_file(const TelemetryLog& log, const std::string& path);

// Appends with the (time, channel-rank) monotonicity contract enforced.
class TelemetryWriter {
  public:
    explicit TelemetryWriter(LogHeader header) { log_.header = std::move(header); }
    void append(TelemetryRecord r);
    const TelemetryLog& log() const { return log_; }

  private:
    TelemetryLog log_;
};

struct Divergence {
    std::uint64_t t_us = 0;
    std::string channel;
    std::string key;
    std::string value_a;
    std::string value_b;
    std::string note;  // set for missing records / structural mismatches
};

struct DiffReport {
    std::vector<Divergence> divergences;
    bool truncated = false;  // more than max_divergences found
    bool empty() const { return divergences.empty(); }
};

// Alignment by (time, channel, within-group sequence). Numeric fields
// compare within the per-channel absolute tolerance (missing entry: exact).
// Header field mismatches are reported as divergences on channel "header".
DiffReport diff_logs(const TelemetryLog& a, const TelemetryLog& b,
                     const std::map<std::string, double>& tolerances,
                     std::size_t max_divergences = 50);

std::string format_value(const Value& v);         // serialized form
std::string format_value_pretty(const Value& v);  // decimals for humans

}  // namespace skytest
