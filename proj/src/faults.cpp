#include "skytest/faults.hpp"

#include <algorithm>
#include <cmath>

namespace skytest {

namespace {

bool window_active(const FaultEvent& f, double now) {
    bool whole_run_kind =
        f.kind == FaultKind::Wind || f.kind == FaultKind::CmdLatency;
    if (whole_run_kind && f.t1 <= f.t0) return true;
    return now >= f.t0 && now < f.t1;
}

}  // namespace

EffectiveConditions faults_active(const std::vector<FaultEvent>& schedule, double now) {
    EffectiveConditions c;
    for (const auto& f : schedule) {
        if (!window_active(f, now)) continue;
        switch (f.kind) {
            case FaultKind::GpsDropout:
                c.gps_available = false;
                break;
            case FaultKind::GpsDrift:
                c.gps_drift = std::max(c.gps_drift, f.drift_rate);
                break;
            case FaultKind::Occlusion: {
                bool merged = false;
                for (auto& [id, frac] : c.occlusions) {
                    if (id == f.marker_id) {
                        frac = std::max(frac, f.fraction);
                        merged = true;
                    }
                }
                if (!merged) c.occlusions.push_back({f.marker_id, f.fraction});
                break;
            }
            case FaultKind::Lighting:
                c.lighting = std::min(c.lighting, f.factor);
                break;
            case FaultKind::Wind:
                c.wind_mean += f.wind_mean;
                c.gust_sigma = std::max(c.gust_sigma, f.gust_sigma);
                break;
            case FaultKind::CmdLatency:
                c.cmd_delay = std::max(c.cmd_delay, f.delay);
                c.cmd_jitter = std::max(c.cmd_jitter, f.jitter);
                break;
        }
    }
    return c;
}

void DelayedChannel::push(const VelocityCommand& cmd, std::uint64_t seq, double now,
                          double delay, double jitter, SeededRng& rng) {
    double d = delay + std::abs(rng.next_gaussian(0.0, jitter));
    double at = std::max(now + d, last_deliver_);
    last_deliver_ = at;
    queue_.push_back({cmd, seq, now, at});
}

std::vector<TimedCommand> DelayedChannel::poll(double now) {
    std::vector<TimedCommand> out;
    while (!queue_.empty() && queue_.front().deliver_time <= now) {
        out.push_back(queue_.front());
        queue_.pop_front();
    }
    return out;
}

Expected<LatencyStats, LatencyError> measure_latency(std::vector<double> delays) {
    if (delays.empty()) return LatencyError::NoSamples;
    std::sort(delays.begin(), delays.end());
    auto rank = [&](double q) {
        std::size_t n = delays.size();
        std::size_t r = static_cast<std::size_t>(std::ceil(q * n));
        if (r == 0) r = 1;
        return delays[r - 1];
    };
    LatencyStats s;
    s.count = delays.size();
    s.p50 = rank(0.50);
    s.p95 = rank(0.95);
    s.p99 = rank(0.99);
    s.max = delays.back();
    return s;
}

}  // namespace skytest
