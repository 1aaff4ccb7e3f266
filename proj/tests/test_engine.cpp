#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "helpers.hpp"
#include "specsim/engine/engine.hpp"
#include "specsim/metrics/metrics.hpp"

using namespace specsim;
using test_helpers::flat_profile;
using test_helpers::topo_from_yaml;

namespace {

TraceRecord make_record(std::int64_t prompt, std::int64_t output,
                        std::vector<std::uint8_t> bits, SimTime arrival_us = 0,
                        std::int64_t drafter = 0) {
    TraceRecord r;
    r.prompt_length = prompt;
    r.output_length = output;
    r.acceptance_seq = std::move(bits);
    r.arrival_us = arrival_us;
    r.drafter_id = drafter;
    return r;
}

std::vector<std::uint8_t> ones(std::size_t n) { return std::vector<std::uint8_t>(n, 1); }

RunResult run_engine(const std::string& topo_yaml, const LatencyProfile& profile,
                     std::vector<TraceRecord> records, std::uint64_t seed = 1,
                     EngineOptions opts = {}) {
    Topology topo = topo_from_yaml(topo_yaml);
    Engine engine(topo, profile, std::move(records), ArrivalMode{}, seed, opts);
    return engine.run();
}

const char* kOneDraftOneTarget =
    "targets: 1\n"
    "drafts: 1\n"
    "network:\n"
    "  rtt_ms: 10\n"
    "policies:\n"
    "  window:\n"
    "    kind: static\n"
    "    gamma: 4\n";

}  // namespace

TEST_CASE("net_delay: rtt 10 jitter 0 is exactly 5 ms each way") {
    LinkSpec link{10.0, 0.0};
    RngStream rng(1, "jitter");
    for (int i = 0; i < 10; ++i) CHECK(net_delay(link, rng) == 5000);
}

TEST_CASE("net_delay: degenerate local link is zero") {
    LinkSpec link{0.0, 0.0};
    RngStream rng(1, "jitter");
    CHECK(net_delay(link, rng) == 0);
}

TEST_CASE("net_delay: jitter sampling stays in [rtt/2 - j/2, rtt/2 + j/2]") {
    LinkSpec link{30.0, 4.0};
    RngStream rng(7, "jitter");
    double sum = 0.0;
    SimTime lo = INT64_MAX, hi = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        SimTime d = net_delay(link, rng);
        sum += us_to_ms(d);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(sum / n == doctest::Approx(15.0).epsilon(0.1 / 15.0));
    CHECK(lo >= 13000);
    CHECK(hi <= 17000);
}

TEST_CASE("consume_acceptance follows the accept-until-first-reject rule") {
    std::vector<std::uint8_t> bits{1, 0, 1, 1, 1, 1};
    std::size_t cursor = 0;
    auto [acc1, used1] = consume_acceptance(bits, cursor, 4);
    CHECK(acc1 == 1);
    CHECK(used1 == 2);
    CHECK(cursor == 2);
    auto [acc2, used2] = consume_acceptance(bits, cursor, 4);
    CHECK(acc2 == 4);  // bits 2..5 are all ones
    CHECK(used2 == 4);

    std::vector<std::uint8_t> reject{0, 1};
    cursor = 0;
    auto [acc3, used3] = consume_acceptance(reject, cursor, 4);
    CHECK(acc3 == 0);
    CHECK(used3 == 1);

    std::vector<std::uint8_t> all{1, 1, 1, 1};
    cursor = 0;
    auto [acc4, used4] = consume_acceptance(all, cursor, 4);
    CHECK(acc4 == 4);
    CHECK(used4 == 4);
}

TEST_CASE("consume_acceptance re-reads an exhausted sequence cyclically") {
    std::vector<std::uint8_t> bits{1, 0};
    std::size_t cursor = 0;
    consume_acceptance(bits, cursor, 4);  // consumes [1,0]
    auto [acc, used] = consume_acceptance(bits, cursor, 4);
    CHECK(acc == 1);  // wraps to bits[0]=1, bits[1]=0
    CHECK(used == 2);
}

TEST_CASE("single-request distributed timeline is exact") {
    // draft 1 ms/token, target 20 ms/step, prefill 0.01*(L+1) ms, rtt 10 ms
    LatencyProfile profile = flat_profile(1.0, 20.0, 0.01);
    EngineOptions opts;
    opts.collect_event_log = true;
    RunResult rr = run_engine(kOneDraftOneTarget, profile,
                              {make_record(10, 5, ones(5))}, 1, opts);
    REQUIRE(rr.records.size() == 1);
    const MetricsRecord& r = rr.records[0];
    // draft prefill 110us; speculation 4 ms; one-way 5 ms; verify 20 ms;
    // result back 5 ms => first commit at 34.110 ms, all 5 tokens at once
    CHECK(r.ttft_ms == doctest::Approx(34.110));
    CHECK(r.e2e_latency_ms == doctest::Approx(34.110));
    CHECK(r.gamma_sequence == std::vector<int>{4});
    CHECK(r.committed_sequence == std::vector<int>{5});
    REQUIRE(r.acceptance_ratio.has_value());
    CHECK(*r.acceptance_ratio == 1.0);

    // proposal reaches the target at 110 + 4000 + 5000 us
    bool found = false;
    for (const auto& line : rr.event_log) {
        if (line.find("proposal_at_target") != std::string::npos) {
            CHECK(line.find("t_us=9110 ") != std::string::npos);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("all-ones acceptance with gamma=g completes in ceil(L/(g+1)) iterations") {
    LatencyProfile profile = flat_profile(1.0, 10.0);
    for (int g : {1, 2, 4}) {
        std::string topo =
            "targets: 1\ndrafts: 1\nnetwork:\n  rtt_ms: 2\n"
            "policies:\n  window:\n    kind: static\n    gamma: " +
            std::to_string(g) + "\n";
        for (std::int64_t L : {1, 7, 20}) {
            RunResult rr = run_engine(topo, profile,
                                      {make_record(8, L, ones(static_cast<std::size_t>(L)))});
            REQUIRE(rr.records.size() == 1);
            auto expected = static_cast<std::size_t>((L + g) / (g + 1));
            CHECK(rr.records[0].gamma_sequence.size() == expected);
        }
    }
}

TEST_CASE("token conservation and per-iteration committed bounds on a mixed workload") {
    LatencyProfile profile = flat_profile(0.5, 8.0);
    SyntheticSpec spec;
    spec.rate_rps = 50.0;
    spec.n_requests = 120;
    spec.acceptance_rate = 0.7;
    spec.n_drafts = 4;
    spec.lengths.prompt_median = 16;
    spec.lengths.output_median = 30;
    auto records = generate_synthetic(spec, 11);
    RunResult rr = run_engine(
        "targets: 2\ndrafts: 4\nnetwork:\n  rtt_ms: 6\n  jitter_ms: 1\n"
        "policies:\n  routing: jsq\n  window:\n    kind: static\n    gamma: 4\n",
        profile, records, 3);
    REQUIRE(rr.records.size() == 120);
    for (const auto& r : rr.records) {
        std::int64_t total = 0;
        REQUIRE(r.gamma_sequence.size() == r.committed_sequence.size());
        for (std::size_t i = 0; i < r.committed_sequence.size(); ++i) {
            int committed = r.committed_sequence[i];
            int gamma = r.gamma_sequence[i];
            CHECK(committed >= 1);
            CHECK(committed <= gamma + 1);
            total += committed;
        }
        CHECK(total == r.output_length);
    }
}

TEST_CASE("server busy intervals never overlap per server") {
    LatencyProfile profile = flat_profile(0.5, 8.0);
    SyntheticSpec spec;
    spec.rate_rps = 100.0;
    spec.n_requests = 60;
    spec.n_drafts = 2;
    spec.lengths.prompt_median = 10;
    spec.lengths.output_median = 20;
    auto records = generate_synthetic(spec, 21);
    RunResult rr = run_engine(
        "targets: 1\ndrafts: 2\nnetwork:\n  rtt_ms: 4\npolicies:\n  window:\n    kind: static\n"
        "    gamma: 3\n",
        profile, records, 9);
    std::map<std::pair<int, int>, SimTime> last_end;
    for (const auto& b : rr.busy_intervals) {
        auto key = std::make_pair(b.role == Role::Draft ? 1 : 0, b.server_id);
        CHECK(b.start >= last_end[key]);
        CHECK(b.end > b.start);
        last_end[key] = b.end;
    }
}

TEST_CASE("same seed reproduces event logs and reports exactly") {
    LatencyProfile profile = flat_profile(0.5, 8.0);
    SyntheticSpec spec;
    spec.rate_rps = 80.0;
    spec.n_requests = 40;
    spec.n_drafts = 3;
    auto records = generate_synthetic(spec, 5);
    EngineOptions opts;
    opts.collect_event_log = true;
    std::string topo =
        "targets: 2\ndrafts: 3\nnetwork:\n  rtt_ms: 8\n  jitter_ms: 3\n"
        "policies:\n  routing: random\n  window:\n    kind: static\n    gamma: 4\n";
    RunResult a = run_engine(topo, profile, records, 1234, opts);
    RunResult b = run_engine(topo, profile, records, 1234, opts);
    CHECK(a.event_log == b.event_log);
    std::string ra = emit_report(a.records, a.system, "x", 1234);
    std::string rb = emit_report(b.records, b.system, "x", 1234);
    CHECK(ra == rb);

    RunResult c = run_engine(topo, profile, records, 999, opts);
    CHECK(a.event_log != c.event_log);
}

TEST_CASE("jsq routes to the target with fewer open requests") {
    LatencyProfile profile = flat_profile(1.0, 50.0, 0.5);
    // two simultaneous arrivals then a third: targets 0 and 1 each get one,
    // the third goes wherever depth is lowest (tie -> 0 after completions)
    std::vector<TraceRecord> records;
    records.push_back(make_record(10, 2, ones(2), 0, 0));
    records.push_back(make_record(10, 2, ones(2), 0, 1));
    records.push_back(make_record(10, 2, ones(2), 100, 2));
    RunResult rr = run_engine(
        "targets: 2\ndrafts: 3\nnetwork:\n  rtt_ms: 2\npolicies:\n  routing: jsq\n"
        "  window:\n    kind: static\n    gamma: 2\n",
        profile, records);
    REQUIRE(rr.records.size() == 3);
    CHECK(rr.records[0].routing_decision == 0);  // empty tie -> lowest id
    CHECK(rr.records[1].routing_decision == 1);  // depth (1,0)
    CHECK(rr.records[2].routing_decision == 0);  // depth (1,1) tie -> 0
}

TEST_CASE("single target receives every request under any routing policy") {
    LatencyProfile profile = flat_profile(1.0, 5.0);
    for (const char* routing : {"random", "rr", "jsq"}) {
        std::vector<TraceRecord> records;
        for (int i = 0; i < 5; ++i)
            records.push_back(make_record(4, 3, ones(3), i * 1000, i % 2));
        RunResult rr = run_engine(
            "targets: 1\ndrafts: 2\npolicies:\n  routing: " + std::string(routing) +
                "\n  window:\n    kind: static\n    gamma: 2\n",
            profile, records);
        for (const auto& r : rr.records) CHECK(r.routing_decision == 0);
    }
}

TEST_CASE("prefill batches pad to the longest member") {
    LatencyProfile profile = flat_profile(1.0, 5.0, 0.01);
    // fused-only so both requests queue prefill directly at the target
    std::vector<TraceRecord> records;
    records.push_back(make_record(10, 1, ones(1), 0));
    records.push_back(make_record(50, 1, ones(1), 0));
    RunResult rr = run_engine(
        "targets: 1\npolicies:\n  window: fused\n  batching:\n    max_batch_size: 8\n"
        "    batching_window_us: 1000\n",
        profile, records);
    REQUIRE(!rr.busy_intervals.empty());
    const BusyInterval& first = rr.busy_intervals.front();
    // both prompts join one batch at the window expiry; padded prefill:
    // 0.01 * (50 + 1) ms = 510 us for the pair
    CHECK(first.start == 1000);
    CHECK(first.end - first.start == 510);
}

TEST_CASE("fused mode: reports are unchanged by any rtt setting") {
    LatencyProfile profile = flat_profile(1.0, 12.0, 0.05);
    SyntheticSpec spec;
    spec.rate_rps = 30.0;
    spec.n_requests = 30;
    spec.n_drafts = 2;
    auto records = generate_synthetic(spec, 17);
    auto metrics_of = [&](double rtt) {
        std::string topo = "targets: 1\ndrafts: 2\nnetwork:\n  rtt_ms: " +
                           std::to_string(rtt) +
                           "\npolicies:\n  window: fused\n";
        RunResult rr = run_engine(topo, profile, records, 42);
        return emit_report(rr.records, rr.system, "same", 42);
    };
    std::string base = metrics_of(0);
    CHECK(metrics_of(10) == base);
    CHECK(metrics_of(100) == base);
}

TEST_CASE("fused tpot equals the target per-token decode latency") {
    LatencyProfile profile = flat_profile(1.0, 20.0, 0.01);
    RunResult rr = run_engine("targets: 1\npolicies:\n  window: fused\n", profile,
                              {make_record(10, 50, ones(50))});
    REQUIRE(rr.records.size() == 1);
    REQUIRE(rr.records[0].tpot_ms.has_value());
    CHECK(*rr.records[0].tpot_ms == doctest::Approx(20.0));
}

TEST_CASE("fused output_length=1: exactly one decode step after prefill") {
    LatencyProfile profile = flat_profile(1.0, 20.0, 0.01);
    RunResult rr = run_engine("targets: 1\npolicies:\n  window: fused\n", profile,
                              {make_record(10, 1, ones(1))});
    REQUIRE(rr.busy_intervals.size() == 2);  // prefill + one decode
    CHECK(rr.records[0].committed_sequence == std::vector<int>{1});
    CHECK_FALSE(rr.records[0].tpot_ms.has_value());
}

TEST_CASE("zero-output request completes at prefill with null tpot") {
    LatencyProfile profile = flat_profile(1.0, 20.0, 0.01);
    RunResult fused = run_engine("targets: 1\npolicies:\n  window: fused\n", profile,
                                 {make_record(10, 0, {})});
    REQUIRE(fused.records.size() == 1);
    CHECK(fused.records[0].e2e_latency_ms == doctest::Approx(0.110));
    CHECK_FALSE(fused.records[0].tpot_ms.has_value());

    RunResult dist = run_engine(kOneDraftOneTarget, profile, {make_record(10, 0, {})});
    REQUIRE(dist.records.size() == 1);
    CHECK(dist.records[0].gamma_sequence.empty());
}

TEST_CASE("saturation: arrivals faster than service leave a growing backlog") {
    // fused, one target, one token per 20 ms, batch 1 => ~5 req/s capacity
    // at 10 tokens per request; offered 10 req/s for 10 s
    LatencyProfile profile = flat_profile(1.0, 20.0, 0.001);
    SyntheticSpec spec;
    spec.rate_rps = 10.0;
    spec.n_requests = 100;
    spec.lengths.prompt_median = 4;
    spec.lengths.prompt_sigma = 0.01;
    spec.lengths.output_median = 10;
    spec.lengths.output_sigma = 0.01;
    auto records = generate_synthetic(spec, 8);
    RunResult rr = run_engine(
        "targets: 1\npolicies:\n  window: fused\n  batching:\n    max_batch_size: 1\n", profile,
        records, 2);
    REQUIRE(rr.records.size() == 100);
    double throughput = rr.system.throughput_rps.value_or(0.0);
    CHECK(throughput < 6.0);  // pinned by service capacity, not offered load
    CHECK(throughput > 4.0);
    // backlog keeps the system busy long after the last arrival
    SimTime last_arrival = records.back().arrival_us;
    CHECK(rr.end_time > last_arrival + last_arrival / 2);
}

TEST_CASE("run-level acceptance ratio converges to the trace alpha") {
    LatencyProfile profile = flat_profile(0.2, 2.0, 0.01);
    SyntheticSpec spec;
    spec.rate_rps = 400.0;
    spec.n_requests = 720;
    spec.acceptance_rate = 0.7;
    spec.n_drafts = 8;
    spec.lengths.prompt_median = 8;
    spec.lengths.output_median = 160;
    spec.lengths.output_sigma = 0.1;
    auto records = generate_synthetic(spec, 404);
    RunResult rr = run_engine(
        "targets: 2\ndrafts: 8\nnetwork:\n  rtt_ms: 2\npolicies:\n  window:\n    kind: static\n"
        "    gamma: 4\n",
        profile, records, 6);
    // weight each request by its examined drafts: a window that commits
    // gamma+1 examined gamma bits (full accept), anything else examined
    // exactly the committed count
    double accepted = 0.0, examined = 0.0;
    for (const auto& r : rr.records) {
        REQUIRE(r.acceptance_ratio.has_value());
        double req_examined = 0.0;
        for (std::size_t i = 0; i < r.gamma_sequence.size(); ++i) {
            int g = r.gamma_sequence[i];
            int c = r.committed_sequence[i];
            req_examined += c == g + 1 ? g : c;
        }
        examined += req_examined;
        accepted += *r.acceptance_ratio * req_examined;
    }
    REQUIRE(examined >= 100000.0);
    CHECK(std::fabs(accepted / examined - 0.7) < 0.02);
}

TEST_CASE("poisson arrival mode overrides trace timestamps") {
    LatencyProfile profile = flat_profile(1.0, 5.0);
    std::vector<TraceRecord> records;
    for (int i = 0; i < 10; ++i) records.push_back(make_record(4, 2, ones(2), 0, 0));
    Topology topo = topo_from_yaml(
        "targets: 1\ndrafts: 1\npolicies:\n  window:\n    kind: static\n    gamma: 2\n");
    Engine engine(topo, profile, records, ArrivalMode{ArrivalModeKind::Poisson, 50.0}, 4);
    RunResult rr = engine.run();
    REQUIRE(rr.records.size() == 10);
    // all trace timestamps were 0; sampled ones must differ
    int nonzero = 0;
    for (const auto& r : rr.records) nonzero += r.arrival_ms > 0.0 ? 1 : 0;
    CHECK(nonzero == 10);
}

TEST_CASE("two records with the same timestamp run in record order") {
    LatencyProfile profile = flat_profile(1.0, 5.0, 0.01);
    std::vector<TraceRecord> records;
    records.push_back(make_record(4, 1, ones(1), 500, 0));
    records.push_back(make_record(4, 1, ones(1), 500, 0));
    RunResult rr = run_engine(kOneDraftOneTarget, profile, records);
    REQUIRE(rr.records.size() == 2);
    // same drafter: record 0 holds the session first, so it finishes first
    CHECK(rr.records[0].e2e_latency_ms < rr.records[1].e2e_latency_ms);
}
