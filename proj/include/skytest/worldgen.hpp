#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skytest/expected.hpp"
#include "skytest/scenario.hpp"

namespace skytest {

// Scenario families for regression suites. Generation is deterministic in
// (family, seed): scenario i only consumes draws after scenario i-1, so a
// longer batch extends a shorter one instead of reshuffling it.
enum class Family { Calm, Cluttered, Windy, Occlusion, Latency };

const char* family_name(Family f);
bool family_from_name(const std::string& name, Family& out);

struct WorldgenError {
    std::string message;
};

// Calm: empty world, direct approach. Cluttered: grounded boxes and
// cylinders, rejection-sampled outside 2 m protected columns over the start
// and the pad; placement that fails 1000 straight attempts is an error.
// Windy: calm plus a whole-run 1.5 m/s mean wind with 0.8 m/s gusts.
// Occlusion: stretched route; even indices get a short occlusion burst timed
// into the descent, odd indices a full-run blackout. Latency: hilemu stage
// with a 50 ms +- 10 ms command link and a route long enough for 500+
// commands.
Expected<std::vector<Scenario>, WorldgenError> generate_family(Family f, int count,
                                                               std::uint64_t seed);

}  // namespace skytest
