#include "specsim/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "specsim/errors.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim {

double percentile_nearest_rank(std::vector<double> values, double q) {
    if (values.empty()) throw ValidationError("percentile of empty sample");
    std::sort(values.begin(), values.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())));
    if (rank == 0) rank = 1;
    return values[rank - 1];
}

MetricsCollector::MetricsCollector(int n_drafts, int n_targets, int queue_capacity,
                                   int gamma_init, std::vector<double> cold_rtt_ms_per_pair)
    : n_drafts_(n_drafts),
      n_targets_(n_targets),
      queue_capacity_(queue_capacity),
      gamma_init_(gamma_init),
      cold_rtt_ms_(std::move(cold_rtt_ms_per_pair)) {
    pairs_.assign(static_cast<std::size_t>(std::max(n_drafts, 0)) *
                      static_cast<std::size_t>(n_targets),
                  PairStats(gamma_init));
    targets_.assign(static_cast<std::size_t>(n_targets), TargetStats{});
    if (cold_rtt_ms_.empty()) cold_rtt_ms_.assign(pairs_.size(), 0.0);
}

std::size_t MetricsCollector::pair_index(int draft_id, int target_id) const {
    return static_cast<std::size_t>(draft_id) * static_cast<std::size_t>(n_targets_) +
           static_cast<std::size_t>(target_id);
}

void MetricsCollector::on_route(int target_id, SimTime arrival) {
    ++targets_[static_cast<std::size_t>(target_id)].open_requests;
    if (first_arrival_ < 0 || arrival < first_arrival_) first_arrival_ = arrival;
}

void MetricsCollector::on_verify(int draft_id, int target_id, int examined, int accepted) {
    PairStats& p = pairs_[pair_index(draft_id, target_id)];
    if (static_cast<int>(p.acc_examined.size()) < kAcceptanceWindow) {
        p.acc_examined.push_back(examined);
        p.acc_accepted.push_back(accepted);
    } else {
        p.acc_examined[static_cast<std::size_t>(p.acc_pos)] = examined;
        p.acc_accepted[static_cast<std::size_t>(p.acc_pos)] = accepted;
        p.acc_pos = (p.acc_pos + 1) % kAcceptanceWindow;
    }
}

void MetricsCollector::on_rtt_sample(int draft_id, int target_id, double rtt_ms) {
    PairStats& p = pairs_[pair_index(draft_id, target_id)];
    if (static_cast<int>(p.rtt_ms.size()) < kRttWindow) {
        p.rtt_ms.push_back(rtt_ms);
    } else {
        p.rtt_ms[static_cast<std::size_t>(p.rtt_pos)] = rtt_ms;
        p.rtt_pos = (p.rtt_pos + 1) % kRttWindow;
    }
}

void MetricsCollector::on_gamma_chosen(int draft_id, int target_id, int gamma) {
    pairs_[pair_index(draft_id, target_id)].gamma_prev = gamma;
}

void MetricsCollector::on_net_queue_wait(SimTime wait_us) {
    net_queue_wait_total_us_ += wait_us;
    ++net_queue_wait_count_;
}

void MetricsCollector::add_record(MetricsRecord record, int target_id, SimTime completion) {
    TargetStats& t = targets_[static_cast<std::size_t>(target_id)];
    --t.open_requests;
    if (record.tpot_ms.has_value()) {
        if (static_cast<int>(t.tpot_ms.size()) < kTpotWindow) {
            t.tpot_ms.push_back(*record.tpot_ms);
        } else {
            t.tpot_ms[static_cast<std::size_t>(t.tpot_pos)] = *record.tpot_ms;
            t.tpot_pos = (t.tpot_pos + 1) % kTpotWindow;
        }
    }
    if (completion > last_completion_) last_completion_ = completion;
    records_.push_back(std::move(record));
}

int MetricsCollector::queue_depth(int target_id) const {
    return targets_[static_cast<std::size_t>(target_id)].open_requests;
}

double MetricsCollector::queue_utilization(int target_id) const {
    double u = static_cast<double>(queue_depth(target_id)) /
               static_cast<double>(queue_capacity_);
    return std::clamp(u, 0.0, 1.0);
}

double MetricsCollector::acceptance_recent(int draft_id, int target_id) const {
    const PairStats& p = pairs_[pair_index(draft_id, target_id)];
    std::int64_t examined = 0, accepted = 0;
    for (int v : p.acc_examined) examined += v;
    for (int v : p.acc_accepted) accepted += v;
    if (examined == 0) return 0.5;  // cold-start prior
    return static_cast<double>(accepted) / static_cast<double>(examined);
}

double MetricsCollector::rtt_recent_ms(int draft_id, int target_id) const {
    const PairStats& p = pairs_[pair_index(draft_id, target_id)];
    if (p.rtt_ms.empty()) return cold_rtt_ms_[pair_index(draft_id, target_id)];
    double sum = 0.0;
    for (double v : p.rtt_ms) sum += v;
    return sum / static_cast<double>(p.rtt_ms.size());
}

double MetricsCollector::tpot_recent_ms(int target_id) const {
    const TargetStats& t = targets_[static_cast<std::size_t>(target_id)];
    if (t.tpot_ms.empty()) return 0.0;
    double sum = 0.0;
    for (double v : t.tpot_ms) sum += v;
    return sum / static_cast<double>(t.tpot_ms.size());
}

int MetricsCollector::gamma_prev(int draft_id, int target_id) const {
    return pairs_[pair_index(draft_id, target_id)].gamma_prev;
}

SystemMetrics MetricsCollector::system(const std::vector<std::int64_t>& busy_us_per_target) const {
    SystemMetrics s;
    s.completed = static_cast<std::int64_t>(records_.size());
    if (s.completed > 0 && last_completion_ > first_arrival_) {
        SimTime duration_us = last_completion_ - first_arrival_;
        s.duration_ms = us_to_ms(duration_us);
        s.throughput_rps =
            static_cast<double>(s.completed) / (static_cast<double>(duration_us) / 1e6);
        s.target_utilization.reserve(busy_us_per_target.size());
        for (std::int64_t busy : busy_us_per_target) {
            double u = static_cast<double>(busy) / static_cast<double>(duration_us);
            s.target_utilization.push_back(std::clamp(u, 0.0, 1.0));
        }
    } else {
        s.target_utilization.assign(busy_us_per_target.size(), 0.0);
    }
    s.net_queue_delay_total_ms = us_to_ms(net_queue_wait_total_us_);
    if (net_queue_wait_count_ > 0) {
        s.net_queue_delay_mean_ms =
            s.net_queue_delay_total_ms / static_cast<double>(net_queue_wait_count_);
    }

    std::vector<double> ttft, tpot, e2e;
    for (const auto& r : records_) {
        ttft.push_back(r.ttft_ms);
        e2e.push_back(r.e2e_latency_ms);
        if (r.tpot_ms.has_value()) tpot.push_back(*r.tpot_ms);
    }
    auto pct = [](const std::vector<double>& v) -> std::optional<Percentiles> {
        if (v.empty()) return std::nullopt;
        Percentiles p;
        p.p50 = percentile_nearest_rank(v, 0.50);
        p.p90 = percentile_nearest_rank(v, 0.90);
        p.p99 = percentile_nearest_rank(v, 0.99);
        return p;
    };
    s.ttft_ms = pct(ttft);
    s.tpot_ms = pct(tpot);
    s.e2e_ms = pct(e2e);
    return s;
}

MetricsRecord finalize_request(std::uint64_t request_id, std::int64_t drafter_id,
                               int routing_decision, std::int64_t prompt_length,
                               std::int64_t output_length, const RequestTimestamps& ts,
                               std::int64_t proposed, std::int64_t accepted,
                               std::vector<int> gamma_sequence,
                               std::vector<int> committed_sequence) {
    if (ts.arrival < 0 || ts.first_token < 0 || ts.completion < 0) {
        throw ValidationError("request " + std::to_string(request_id) +
                              " finalized with missing timestamps");
    }
    MetricsRecord r;
    r.request_id = request_id;
    r.drafter_id = drafter_id;
    r.routing_decision = routing_decision;
    r.arrival_ms = us_to_ms(ts.arrival);
    r.ttft_ms = us_to_ms(ts.first_token - ts.arrival);
    r.e2e_latency_ms = us_to_ms(ts.completion - ts.arrival);
    if (output_length >= 2) {
        r.tpot_ms = us_to_ms(ts.completion - ts.first_token) /
                    static_cast<double>(output_length - 1);
    }
    if (proposed > 0) {
        r.acceptance_ratio = static_cast<double>(accepted) / static_cast<double>(proposed);
    }
    r.prompt_length = prompt_length;
    r.output_length = output_length;
    r.gamma_sequence = std::move(gamma_sequence);
    r.committed_sequence = std::move(committed_sequence);
    return r;
}

std::string emit_report(const std::vector<MetricsRecord>& records, const SystemMetrics& system,
                        const std::string& config_digest, std::uint64_t seed) {
    std::vector<const MetricsRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const MetricsRecord* a, const MetricsRecord* b) {
                  return a->request_id < b->request_id;
              });

    JsonWriter w;
    w.begin_object();
    w.key("config_digest").value(config_digest);
    w.key("seed").value(seed);

    w.key("system").begin_object();
    w.key("completed").value(system.completed);
    w.key("duration_ms");
    system.duration_ms ? w.value_fixed(*system.duration_ms, 3) : w.value_null();
    w.key("throughput_rps");
    system.throughput_rps ? w.value_fixed(*system.throughput_rps, 6) : w.value_null();
    w.key("target_utilization").begin_array();
    for (double u : system.target_utilization) w.value_fixed(u, 6);
    w.end_array();
    w.key("net_queue_delay_total_ms").value_fixed(system.net_queue_delay_total_ms, 3);
    w.key("net_queue_delay_mean_ms");
    system.net_queue_delay_mean_ms ? w.value_fixed(*system.net_queue_delay_mean_ms, 3)
                                   : w.value_null();
    auto pct = [&](const char* name, const std::optional<Percentiles>& p) {
        w.key(name);
        if (!p) {
            w.value_null();
            return;
        }
        w.begin_object();
        w.key("p50").value_fixed(p->p50, 3);
        w.key("p90").value_fixed(p->p90, 3);
        w.key("p99").value_fixed(p->p99, 3);
        w.end_object();
    };
    w.key("percentiles").begin_object();
    pct("ttft_ms", system.ttft_ms);
    pct("tpot_ms", system.tpot_ms);
    pct("e2e_ms", system.e2e_ms);
    w.end_object();
    w.end_object();

    w.key("requests").begin_array();
    for (const MetricsRecord* r : sorted) {
        w.begin_object();
        w.key("request_id").value(r->request_id);
        w.key("drafter_id").value(r->drafter_id);
        w.key("target_id").value(r->routing_decision);
        w.key("arrival_ms").value_fixed(r->arrival_ms, 3);
        w.key("ttft_ms").value_fixed(r->ttft_ms, 3);
        w.key("tpot_ms");
        r->tpot_ms ? w.value_fixed(*r->tpot_ms, 3) : w.value_null();
        w.key("e2e_latency_ms").value_fixed(r->e2e_latency_ms, 3);
        w.key("acceptance_ratio");
        r->acceptance_ratio ? w.value_fixed(*r->acceptance_ratio, 6) : w.value_null();
        w.key("prompt_length").value(r->prompt_length);
        w.key("output_length").value(r->output_length);
        w.key("gamma_sequence").begin_array();
        for (int g : r->gamma_sequence) w.value(g);
        w.end_array();
        w.key("committed_sequence").begin_array();
        for (int c : r->committed_sequence) w.value(c);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    std::string out = w.take();
    out += '\n';
    return out;
}

std::string emit_report_csv(const std::vector<MetricsRecord>& records) {
    std::vector<const MetricsRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(),
              [](const MetricsRecord* a, const MetricsRecord* b) {
                  return a->request_id < b->request_id;
              });
    std::string out =
        "request_id,drafter_id,target_id,arrival_ms,ttft_ms,tpot_ms,e2e_latency_ms,"
        "acceptance_ratio,prompt_length,output_length,iterations\n";
    for (const MetricsRecord* r : sorted) {
        out += std::to_string(r->request_id) + ',' + std::to_string(r->drafter_id) + ',' +
               std::to_string(r->routing_decision) + ',' + format_fixed(r->arrival_ms, 3) + ',' +
               format_fixed(r->ttft_ms, 3) + ',';
        out += r->tpot_ms ? format_fixed(*r->tpot_ms, 3) : "";
        out += ',' + format_fixed(r->e2e_latency_ms, 3) + ',';
        out += r->acceptance_ratio ? format_fixed(*r->acceptance_ratio, 6) : "";
        out += ',' + std::to_string(r->prompt_length) + ',' + std::to_string(r->output_length) +
               ',' + std::to_string(r->gamma_sequence.size()) + '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace specsim
