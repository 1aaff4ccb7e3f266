#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specsim/sim/time.hpp"

namespace specsim {

// Per-request record, computed once the request reaches Done.
struct MetricsRecord {
    std::uint64_t request_id = 0;
    std::int64_t drafter_id = -1;  // -1 in fused-only deployments
    int routing_decision = 0;      // target id
    double arrival_ms = 0.0;
    double ttft_ms = 0.0;
    std::optional<double> tpot_ms;            // null when output_length < 2
    double e2e_latency_ms = 0.0;
    // accepted / examined drafts; tokens after the first reject are never
    // evaluated, so this estimates the per-token acceptance probability.
    // Null when nothing was verified (pure fused execution).
    std::optional<double> acceptance_ratio;
    std::int64_t prompt_length = 0;
    std::int64_t output_length = 0;
    std::vector<int> gamma_sequence;      // chosen window per iteration, 0 = fused step
    std::vector<int> committed_sequence;  // tokens committed per iteration
};

struct Percentiles {
    double p50 = 0.0, p90 = 0.0, p99 = 0.0;
};

struct SystemMetrics {
    std::int64_t completed = 0;
    // Measurement interval: first arrival to last completion.
    std::optional<double> duration_ms;
    std::optional<double> throughput_rps;
    std::vector<double> target_utilization;  // busy time / duration, in [0, 1]
    double net_queue_delay_total_ms = 0.0;
    std::optional<double> net_queue_delay_mean_ms;
    std::optional<Percentiles> ttft_ms, tpot_ms, e2e_ms;
};

// Nearest-rank percentile of an unsorted sample.
double percentile_nearest_rank(std::vector<double> values, double q);

// Everything the engine reports into, plus the sliding-window statistics
// consumed by window policies and feature extraction. Owned by a single
// simulation instance.
class MetricsCollector {
public:
    MetricsCollector(int n_drafts, int n_targets, int queue_capacity, int gamma_init,
                     std::vector<double> cold_rtt_ms_per_pair);

    // --- engine hooks -----------------------------------------------------
    void on_route(int target_id, SimTime arrival);
    void on_verify(int draft_id, int target_id, int examined, int accepted);
    void on_rtt_sample(int draft_id, int target_id, double rtt_ms);
    void on_gamma_chosen(int draft_id, int target_id, int gamma);
    void on_net_queue_wait(SimTime wait_us);
    void add_record(MetricsRecord record, int target_id, SimTime completion);

    // --- snapshot queries (committed history only, no look-ahead) ---------
    int n_targets() const { return n_targets_; }
    int queue_depth(int target_id) const;  // open requests routed, not done
    double queue_utilization(int target_id) const;
    double acceptance_recent(int draft_id, int target_id) const;  // cold 0.5
    double rtt_recent_ms(int draft_id, int target_id) const;      // cold: link rtt
    double tpot_recent_ms(int target_id) const;                   // cold 0
    int gamma_prev(int draft_id, int target_id) const;            // cold gamma_init

    // --- finalization ------------------------------------------------------
    SystemMetrics system(const std::vector<std::int64_t>& busy_us_per_target) const;
    const std::vector<MetricsRecord>& records() const { return records_; }

    static constexpr int kAcceptanceWindow = 20;  // verify iterations per pair
    static constexpr int kRttWindow = 20;         // rtt samples per pair
    static constexpr int kTpotWindow = 50;        // completions per target

private:
    struct PairStats {
        // fixed-capacity rings; recompute sums on query to keep results
        // independent of insertion history
        std::vector<int> acc_examined, acc_accepted;
        int acc_pos = 0;
        std::vector<double> rtt_ms;
        int rtt_pos = 0;
        int gamma_prev;
        explicit PairStats(int gamma_init) : gamma_prev(gamma_init) {}
    };
    struct TargetStats {
        std::vector<double> tpot_ms;
        int tpot_pos = 0;
        int open_requests = 0;
    };

    std::size_t pair_index(int draft_id, int target_id) const;

    int n_drafts_, n_targets_, queue_capacity_, gamma_init_;
    std::vector<PairStats> pairs_;
    std::vector<TargetStats> targets_;
    std::vector<double> cold_rtt_ms_;  // per pair

    std::vector<MetricsRecord> records_;
    SimTime first_arrival_ = -1;
    SimTime last_completion_ = -1;
    SimTime net_queue_wait_total_us_ = 0;
    std::int64_t net_queue_wait_count_ = 0;
};

// Computes the per-request record from raw timestamps; throws
// ValidationError when a Done request is missing one.
struct RequestTimestamps {
    SimTime arrival = -1, first_token = -1, completion = -1;
};
MetricsRecord finalize_request(std::uint64_t request_id, std::int64_t drafter_id,
                               int routing_decision, std::int64_t prompt_length,
                               std::int64_t output_length, const RequestTimestamps& ts,
                               std::int64_t proposed, std::int64_t accepted,
                               std::vector<int> gamma_sequence,
                               std::vector<int> committed_sequence);

// Deterministic structured report: stable key order, fixed decimal widths,
// requests sorted by request_id. Byte-identical across identical runs.
std::string emit_report(const std::vector<MetricsRecord>& records, const SystemMetrics& system,
                        const std::string& config_digest, std::uint64_t seed);

std::string emit_report_csv(const std::vector<MetricsRecord>& records);

void write_file(const std::string& path, const std::string& content);

}  // namespace specsim
