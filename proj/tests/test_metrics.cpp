#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "specsim/awc/features.hpp"
#include "specsim/errors.hpp"
#include "specsim/metrics/metrics.hpp"
#include "specsim/sim/rng.hpp"

using namespace specsim;

namespace {

MetricsCollector make_collector(int drafts = 2, int targets = 2, double cold_rtt = 10.0) {
    std::vector<double> cold(static_cast<std::size_t>(drafts * targets), cold_rtt);
    return MetricsCollector(drafts, targets, 64, 4, cold);
}

}  // namespace

TEST_CASE("finalize_request arithmetic: ttft and tpot definitions") {
    RequestTimestamps ts{0, 100000, 1000000};  // 0, 100 ms, 1000 ms
    MetricsRecord r = finalize_request(1, 0, 0, 27, 91, ts, 120, 90, {4, 4}, {5, 5});
    CHECK(r.ttft_ms == doctest::Approx(100.0));
    REQUIRE(r.tpot_ms.has_value());
    CHECK(*r.tpot_ms == doctest::Approx((1000.0 - 100.0) / 90.0));
    CHECK(r.e2e_latency_ms == doctest::Approx(1000.0));
    REQUIRE(r.acceptance_ratio.has_value());
    CHECK(*r.acceptance_ratio == doctest::Approx(0.75));
}

TEST_CASE("tpot is null for single-token outputs") {
    RequestTimestamps ts{0, 50, 50};
    MetricsRecord r = finalize_request(0, 0, 0, 10, 1, ts, 4, 4, {4}, {1});
    CHECK_FALSE(r.tpot_ms.has_value());
}

TEST_CASE("acceptance ratio is null when nothing was proposed") {
    RequestTimestamps ts{0, 50, 150};
    MetricsRecord r = finalize_request(0, -1, 0, 10, 5, ts, 0, 0, {0, 0}, {1, 1});
    CHECK_FALSE(r.acceptance_ratio.has_value());
}

TEST_CASE("finalize_request requires all timestamps") {
    RequestTimestamps ts{0, -1, 100};
    CHECK_THROWS_AS(finalize_request(0, 0, 0, 1, 1, ts, 0, 0, {}, {}), ValidationError);
}

TEST_CASE("snapshot cold-start defaults") {
    MetricsCollector m = make_collector();
    CHECK(m.queue_depth(0) == 0);
    CHECK(m.queue_utilization(0) == 0.0);
    CHECK(m.acceptance_recent(0, 0) == 0.5);
    CHECK(m.rtt_recent_ms(0, 0) == 10.0);
    CHECK(m.tpot_recent_ms(0) == 0.0);
    CHECK(m.gamma_prev(0, 0) == 4);

    FeatureVector f = extract_features(m, 1, 1);
    CHECK(f.q_depth == 0.0);
    CHECK(f.alpha_recent == 0.5);
    CHECK(f.rtt_recent_ms == 10.0);
    CHECK(f.tpot_recent_ms == 0.0);
    CHECK(f.gamma_prev == 4.0);
}

TEST_CASE("pair acceptance after one verify of 4 proposed, 2 accepted") {
    MetricsCollector m = make_collector();
    m.on_verify(0, 1, 4, 2);
    CHECK(m.acceptance_recent(0, 1) == doctest::Approx(0.5));
    CHECK(m.acceptance_recent(0, 0) == 0.5);  // other pair untouched
    m.on_verify(0, 1, 4, 4);
    CHECK(m.acceptance_recent(0, 1) == doctest::Approx(6.0 / 8.0));
}

TEST_CASE("acceptance window slides after 20 iterations") {
    MetricsCollector m = make_collector();
    for (int i = 0; i < 20; ++i) m.on_verify(0, 0, 4, 0);
    CHECK(m.acceptance_recent(0, 0) == doctest::Approx(0.0));
    for (int i = 0; i < 20; ++i) m.on_verify(0, 0, 4, 4);
    CHECK(m.acceptance_recent(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("after 20 all-accepted iterations alpha_recent is 1.0") {
    MetricsCollector m = make_collector();
    for (int i = 0; i < 20; ++i) m.on_verify(1, 0, 4, 4);
    CHECK(extract_features(m, 1, 0).alpha_recent == 1.0);
}

TEST_CASE("queue utilization is depth over capacity") {
    MetricsCollector m = make_collector();
    for (int i = 0; i < 8; ++i) m.on_route(0, i);
    CHECK(m.queue_depth(0) == 8);
    CHECK(m.queue_utilization(0) == doctest::Approx(8.0 / 64.0));

    MetricsCollector cap32(1, 1, 32, 4, {0.0});
    for (int i = 0; i < 8; ++i) cap32.on_route(0, i);
    CHECK(cap32.queue_utilization(0) == doctest::Approx(0.25));
    for (int i = 0; i < 100; ++i) cap32.on_route(0, i);
    CHECK(cap32.queue_utilization(0) == 1.0);  // clamped
}

TEST_CASE("snapshot queries are pure: same inputs, same values") {
    MetricsCollector m = make_collector();
    m.on_verify(0, 0, 4, 3);
    m.on_rtt_sample(0, 0, 12.5);
    double a1 = m.acceptance_recent(0, 0);
    double r1 = m.rtt_recent_ms(0, 0);
    CHECK(m.acceptance_recent(0, 0) == a1);
    CHECK(m.rtt_recent_ms(0, 0) == r1);
}

TEST_CASE("percentile ordering p50 <= p90 <= p99") {
    std::vector<double> v;
    RngStream rng(12, "pct");
    for (int i = 0; i < 500; ++i) v.push_back(rng.uniform(0.0, 100.0));
    double p50 = percentile_nearest_rank(v, 0.50);
    double p90 = percentile_nearest_rank(v, 0.90);
    double p99 = percentile_nearest_rank(v, 0.99);
    CHECK(p50 <= p90);
    CHECK(p90 <= p99);
}

TEST_CASE("nearest-rank percentile on a tiny sample") {
    std::vector<double> v{10, 20, 30, 40};
    CHECK(percentile_nearest_rank(v, 0.5) == 20);   // ceil(0.5*4)=2nd
    CHECK(percentile_nearest_rank(v, 0.75) == 30);  // ceil(3)=3rd
    CHECK(percentile_nearest_rank(v, 0.9) == 40);
}

TEST_CASE("empty run emits a valid report with null aggregates") {
    MetricsCollector m = make_collector();
    SystemMetrics sys = m.system({0, 0});
    std::string report = emit_report(m.records(), sys, "deadbeef", 1);
    auto j = nlohmann::json::parse(report);
    CHECK(j["system"]["completed"] == 0);
    CHECK(j["system"]["throughput_rps"].is_null());
    CHECK(j["system"]["percentiles"]["ttft_ms"].is_null());
    CHECK(j["requests"].empty());
}

TEST_CASE("report: requests sorted, aggregates recompute from records") {
    MetricsCollector m = make_collector(1, 1);
    for (int i = 4; i >= 0; --i) {
        m.on_route(0, 0);
    }
    for (int i = 4; i >= 0; --i) {
        RequestTimestamps ts{0, 1000 * (i + 1), 10000 * (i + 1)};
        MetricsRecord r = finalize_request(static_cast<std::uint64_t>(i), 0, 0, 10, 20, ts, 20,
                                           15, {4}, {5});
        m.add_record(std::move(r), 0, ts.completion);
    }
    SystemMetrics sys = m.system({25000});
    std::string report = emit_report(m.records(), sys, "digest", 9);
    auto j = nlohmann::json::parse(report);
    REQUIRE(j["requests"].size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(j["requests"][i]["request_id"] == i);

    // recompute percentiles from the per-request records
    std::vector<double> ttft;
    for (const auto& r : j["requests"]) ttft.push_back(r["ttft_ms"].get<double>());
    CHECK(percentile_nearest_rank(ttft, 0.5) ==
          doctest::Approx(j["system"]["percentiles"]["ttft_ms"]["p50"].get<double>()));

    // throughput * duration == completed
    double thr = j["system"]["throughput_rps"].get<double>();
    double dur_s = j["system"]["duration_ms"].get<double>() / 1000.0;
    CHECK(thr * dur_s == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("identical inputs give byte-identical reports") {
    auto build = [] {
        MetricsCollector m = make_collector(1, 2);
        m.on_route(0, 0);
        m.on_route(1, 5);
        m.on_net_queue_wait(1234);
        RequestTimestamps ts{0, 7000, 42000};
        m.add_record(finalize_request(0, 0, 0, 12, 34, ts, 40, 31, {4, 4}, {5, 5}), 0, 42000);
        RequestTimestamps ts2{5, 9000, 55000};
        m.add_record(finalize_request(1, 0, 1, 15, 1, ts2, 4, 2, {4}, {1}), 1, 55000);
        return emit_report(m.records(), m.system({30000, 20000}), "d", 3);
    };
    CHECK(build() == build());
}

TEST_CASE("csv export carries one row per request") {
    MetricsCollector m = make_collector(1, 1);
    m.on_route(0, 0);
    RequestTimestamps ts{0, 7000, 42000};
    m.add_record(finalize_request(0, 0, 0, 12, 34, ts, 40, 31, {4}, {5}), 0, 42000);
    std::string csv = emit_report_csv(m.records());
    CHECK(csv.find("request_id") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + 1 row
}
