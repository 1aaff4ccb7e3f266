#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specsim/sim/time.hpp"

namespace specsim {

// One workload request with its ground-truth acceptance bit sequence.
// Arrival time is stored in integer microseconds; the wire field
// `arrival_time_ms` is an absolute decimal offset from simulation start.
struct TraceRecord {
    std::int64_t prompt_length = 1;
    std::int64_t output_length = 1;
    std::vector<std::uint8_t> acceptance_seq;  // 1 = accept, 0 = reject
    SimTime arrival_us = 0;
    std::int64_t drafter_id = 0;

    bool operator==(const TraceRecord&) const = default;
};

// JSON Lines, one record per line with keys: prompt_length, output_length,
// acceptance_seq (array of 0/1), arrival_time_ms, drafter_id.
std::vector<TraceRecord> load_trace(const std::string& path);
std::vector<TraceRecord> parse_trace(const std::string& text);
std::string serialize_trace(const std::vector<TraceRecord>& records);
void save_trace(const std::vector<TraceRecord>& records, const std::string& path);

// Validates record invariants; `index` is used in error messages.
void validate_record(const TraceRecord& r, std::size_t index);

// Checked when a trace is bound to a topology.
void validate_drafter_ids(const std::vector<TraceRecord>& records, std::int64_t n_drafts);

enum class ArrivalModeKind { TraceDriven, Poisson };

struct ArrivalMode {
    ArrivalModeKind kind = ArrivalModeKind::TraceDriven;
    double rate_rps = 0.0;  // Poisson only; must be > 0
};

// Prompt/output length distributions for synthetic traces. Lognormal with
// the given median and shape, clamped to [1, cap].
struct LengthDist {
    double prompt_median = 60.0;
    double prompt_sigma = 0.4;
    double output_median = 90.0;
    double output_sigma = 0.35;
    std::int64_t prompt_cap = 4096;
    std::int64_t output_cap = 2048;
};

// Named presets modeled after common benchmark shapes.
LengthDist length_preset(const std::string& name);  // throws ConfigError

struct SyntheticSpec {
    double rate_rps = 10.0;
    std::int64_t n_requests = 0;
    double acceptance_rate = 0.8;
    LengthDist lengths;
    std::int64_t n_drafts = 1;  // drafter_id sampled uniformly over [0, n_drafts)
};

std::vector<TraceRecord> generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace specsim
