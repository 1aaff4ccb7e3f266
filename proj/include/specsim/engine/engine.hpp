#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "specsim/awc/mlp.hpp"
#include "specsim/awc/smoother.hpp"
#include "specsim/config/topology.hpp"
#include "specsim/latency/profile.hpp"
#include "specsim/metrics/metrics.hpp"
#include "specsim/policies/policies.hpp"
#include "specsim/sim/event_queue.hpp"
#include "specsim/sim/rng.hpp"
#include "specsim/workload/trace.hpp"

namespace specsim {

// One-way network delay: rtt/2 plus uniform jitter in [-jitter/2, +jitter/2],
// floored at zero. Consumes exactly one draw from the jitter stream.
SimTime net_delay(const LinkSpec& link, RngStream& jitter_rng);

// Acceptance-bit consumption for one verification: reads bits left to right
// until the first 0 or gamma bits, cyclically re-reading an exhausted
// sequence. Returns {accepted, consumed} and advances the cursor by consumed.
std::pair<int, int> consume_acceptance(const std::vector<std::uint8_t>& bits,
                                       std::size_t& cursor, int gamma);

struct EngineOptions {
    bool collect_event_log = false;
    bool feature_probe = false;  // accumulate the mean AWC feature vector
};

struct BusyInterval {
    Role role;
    int server_id;
    SimTime start;
    SimTime end;
};

struct RunResult {
    std::vector<MetricsRecord> records;
    SystemMetrics system;
    std::vector<std::string> event_log;
    std::vector<BusyInterval> busy_intervals;
    std::array<double, 5> mean_features{};
    std::int64_t feature_samples = 0;
    std::uint64_t events_processed = 0;
    SimTime end_time = 0;
};

// Event-driven execution of the request lifecycle
// (Routing -> Batching -> Speculation -> Verification) over the expanded
// topology, in fused or distributed mode. Single-threaded; one instance
// per simulation run.
class Engine {
public:
    Engine(const Topology& topology, const LatencyProfile& profile,
           std::vector<TraceRecord> trace, ArrivalMode mode, std::uint64_t seed,
           EngineOptions options = {}, const AwcModel* awc_model = nullptr);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    RunResult run();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace specsim
