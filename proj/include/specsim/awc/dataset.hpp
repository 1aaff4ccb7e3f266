#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specsim/awc/train.hpp"
#include "specsim/runner/runner.hpp"
#include "specsim/util/yaml.hpp"

namespace specsim {

// One sweep scenario: a workload trace, a network condition and a hardware
// deployment. Candidates {gamma 2..12, fused} run against the identical
// trace so their objectives are directly comparable.
struct ScenarioSpec {
    std::uint64_t scenario_id = 0;
    std::string split;  // train / val / test
    double rtt_ms = 10.0;
    double jitter_ms = 0.0;
    double alpha = 0.8;
    double load_factor = 0.5;   // fraction of the reference verify capacity
    int drafts = 4;
    int targets = 1;
    double target_decode_ms = 15.0;
    double cost_ratio = 0.1;
    double prompt_median = 24.0;
    double output_median = 56.0;
    int n_requests = 36;
    std::uint64_t seed = 0;
};

struct DatasetGrid {
    std::vector<double> rtt_ms = {2, 10, 30, 60, 100};
    std::vector<double> alpha = {0.3, 0.5, 0.7, 0.85, 0.95};
    std::vector<double> load_factor = {0.35, 0.8};
    std::vector<int> drafts = {2, 6};
    std::vector<double> cost_ratio = {0.05, 0.15};
    double target_decode_ms = 15.0;
    int n_requests = 36;
    std::uint64_t seed = 20240501;

    static DatasetGrid from_node(const yaml::Node& node);
};

// Expands the grid and assigns the 80/10/10 split by scenario (shuffled with
// the grid seed, never by sample).
std::vector<ScenarioSpec> build_scenarios(const DatasetGrid& grid);

std::string serialize_scenarios(const std::vector<ScenarioSpec>& scenarios);
std::vector<ScenarioSpec> parse_scenarios(const std::string& text);

// Objective weights (tpot, ttft, throughput); each term is min-max
// normalized within a scenario's candidate set, lower score is better.
struct ObjectiveWeights {
    double w_tpot = 0.5;
    double w_ttft = 0.2;
    double w_throughput = 0.3;
};

struct CandidateOutcome {
    int gamma = 2;  // 1 encodes fused
    bool fused = false;
    double throughput_rps = 0.0;
    double mean_ttft_ms = 0.0;
    double mean_tpot_ms = 0.0;
    std::array<double, 5> mean_features{};
    double objective = 0.0;  // filled after normalization
};

struct ScenarioSweepResult {
    ScenarioSpec scenario;
    std::vector<CandidateOutcome> candidates;  // gamma 2..12 then fused
    int label_gamma = 2;                       // argmin objective, ties -> lower gamma
};

// Builds the per-scenario trace and config; exposed for eval reuse.
std::vector<TraceRecord> scenario_trace(const ScenarioSpec& s);
yaml::Node scenario_config(const ScenarioSpec& s, const std::string& window_kind, int gamma,
                           const std::string& model_path = "");

// Fills CandidateOutcome::objective with the weighted min-max score over the
// candidate set of one scenario.
void score_candidates(std::vector<CandidateOutcome>& candidates,
                      const ObjectiveWeights& weights);

// Argmin objective; ties break toward the lower encoded gamma.
int pick_label(const std::vector<CandidateOutcome>& candidates);

ScenarioSweepResult sweep_scenario(const ScenarioSpec& scenario, const ObjectiveWeights& weights);

// Runs every scenario x candidate simulation (parallel across scenarios) and
// emits one SweepSample per run plus the labels.
std::vector<SweepSample> generate_dataset(const std::vector<ScenarioSpec>& scenarios,
                                          const ObjectiveWeights& weights, int parallelism,
                                          std::vector<ScenarioSweepResult>* sweeps_out = nullptr);

// Policy comparison on a scenario list (typically the test split).
struct PolicyEval {
    std::string policy;  // static / dynamic / awc
    double mean_throughput_rps = 0.0;
    double mean_ttft_ms = 0.0;
    double mean_tpot_ms = 0.0;
    double mean_chosen_gamma = 0.0;
};

PolicyEval eval_policy_on_scenarios(const std::vector<ScenarioSpec>& scenarios,
                                    const std::string& window_kind, int gamma,
                                    const std::string& model_path, int parallelism);

}  // namespace specsim
