#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specsim/runner/runner.hpp"
#include "specsim/util/yaml.hpp"

namespace specsim {

// Cartesian sweep over dotted-path config overrides. Every (point,
// repetition) gets an independent seed derived from the point's parameter
// assignment, so permuting axis declaration order never changes a point's
// report.
struct SweepSpec {
    yaml::Node base_config;
    std::string base_dir;
    std::uint64_t base_seed = kDefaultSeed;
    int repetitions = 1;
    std::vector<std::pair<std::string, std::vector<yaml::Node>>> axes;

    static SweepSpec from_node(const yaml::Node& node, const std::string& base_dir);
    std::size_t point_count() const;
};

struct SweepPoint {
    std::vector<std::pair<std::string, std::string>> assignment;  // axis -> value
    std::string point_id;  // canonical, axis-order independent
    bool failed = false;
    std::string error;
    double mean_throughput_rps = 0.0;
    double mean_ttft_ms = 0.0;
    double mean_tpot_ms = 0.0;
    std::vector<std::string> report_files;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

std::uint64_t sweep_point_seed(std::uint64_t base_seed, const std::string& point_id,
                               int repetition);

// out_dir may be empty to skip report files. Points run on `parallelism`
// worker threads; each simulation stays single-threaded.
SweepResult run_sweep(const SweepSpec& spec, int parallelism, const std::string& out_dir);

std::string sweep_summary_csv(const SweepResult& result);
std::string sweep_summary_json(const SweepResult& result);

}  // namespace specsim
