#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "skytest/dynamics.hpp"
#include "skytest/expected.hpp"
#include "skytest/geom.hpp"
#include "skytest/world.hpp"

namespace skytest {

enum class FaultKind {
    GpsDropout,
    GpsDrift,
    Occlusion,
    Lighting,
    Wind,
    CmdLatency,
};

// Windowed environmental fault. Active over [t0, t1); wind and latency
// events with t1 <= t0 cover the whole run. Stale map obstacles are not
// events; they live on the world's obstacle list.
struct FaultEvent {
    FaultKind kind = FaultKind::GpsDropout;
    double t0 = 0.0;
    double t1 = 0.0;
    int marker_id = -1;       // Occlusion
    double fraction = 0.0;    // Occlusion
    double drift_rate = 0.0;  // GpsDrift, m per sqrt(s)
    double factor = 1.0;      // Lighting
    Vec3 wind_mean;           // Wind
    double gust_sigma = 0.0;  // Wind
    double delay = 0.0;       // CmdLatency
    double jitter = 0.0;      // CmdLatency
    bool operator==(const FaultEvent&) const = default;
};

// Snapshot of every fault-controlled input at one instant. Overlapping
// windows combine worst-case: dropout ORs, drift and occlusion take the max,
// lighting the min; wind means add and gust sigma takes the max.
struct EffectiveConditions {
    bool gps_available = true;
    double gps_drift = 0.0;
    double occlusion(int marker_id) const {
        for (const auto& [id, f] : occlusions) {
            if (id == marker_id) return f;
        }
        return 0.0;
    }
    std::vector<std::pair<int, double>> occlusions;
    double lighting = 1.0;
    Vec3 wind_mean;
    double gust_sigma = 0.0;
    double cmd_delay = 0.0;
    double cmd_jitter = 0.0;

    bool operator==(const EffectiveConditions&) const = default;
};

EffectiveConditions faults_active(const std::vector<FaultEvent>& schedule, double now);

struct TimedCommand {
    VelocityCommand cmd;
    std::uint64_t seq = 0;
    double issue_time = 0.0;
    double deliver_time = 0.0;
};

// FIFO link with delay plus half-normal jitter. Delivery order equals issue
// order: a command never overtakes its predecessor.
class DelayedChannel {
  public:
    // One gaussian is drawn per push even at zero jitter.
    void push(const VelocityCommand& cmd, std::uint64_t seq, double now,
              double delay, double jitter, SeededRng& rng);
    // All commands with deliver_time <= now, in issue order.
    std::vector<TimedCommand> poll(double now);
    std::size_t pending() const { return queue_.size(); }

  private:
    std::deque<TimedCommand> queue_;
    double last_deliver_ = 0.0;
};

struct LatencyStats {
    std::size_t count = 0;
    double p50 = 0.0;
    double p95 = 0.0;
    double p99 = 0.0;
    double max = 0.0;
};

enum class LatencyError { NoSamples };

// Nearest-rank percentiles over issue-to-delivery delays.
Expected<LatencyStats, LatencyError> measure_latency(std::vector<double> delays);

}  // namespace skytest
