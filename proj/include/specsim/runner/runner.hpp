#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "specsim/awc/mlp.hpp"
#include "specsim/config/topology.hpp"
#include "specsim/engine/engine.hpp"
#include "specsim/latency/profile.hpp"
#include "specsim/util/yaml.hpp"
#include "specsim/workload/trace.hpp"

namespace specsim {

// Everything a single simulation needs, resolved from one config document:
// expanded topology, latency profile, workload records, arrival mode, seed
// and the input digest that goes into the report.
struct ResolvedConfig {
    Topology topology;
    std::shared_ptr<const LatencyProfile> profile;
    std::vector<TraceRecord> trace;
    ArrivalMode mode;
    std::uint64_t seed = 0;
    std::string digest;
    std::shared_ptr<const AwcModel> awc;  // present when window policy is awc
};

// Default seed used when neither the config nor the caller provides one,
// so a bare `run` invocation is reproducible.
inline constexpr std::uint64_t kDefaultSeed = 42;

// `base_dir` anchors relative trace/profile/model paths (usually the config
// file's directory). Strict mode rejects unknown config keys.
ResolvedConfig resolve_config(const yaml::Node& config, bool strict,
                              std::optional<std::uint64_t> seed_override,
                              const std::string& base_dir);

// Same resolution but with the workload supplied by the caller instead of a
// `workload` config section (scenario sweeps reuse one trace across runs).
ResolvedConfig resolve_config_with_trace(const yaml::Node& config, bool strict,
                                         std::uint64_t seed, const std::string& base_dir,
                                         std::vector<TraceRecord> trace, ArrivalMode mode);

struct SimulationOutput {
    RunResult result;
    std::string report_json;
};

SimulationOutput run_simulation(const ResolvedConfig& rc, EngineOptions options = {});

// Mean over per-request values; tpot skips null entries.
struct RunAggregates {
    double mean_ttft_ms = 0.0;
    double mean_tpot_ms = 0.0;
    double throughput_rps = 0.0;
    std::int64_t completed = 0;
};
RunAggregates aggregate_run(const RunResult& result);

}  // namespace specsim
