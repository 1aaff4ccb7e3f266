#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "specsim/errors.hpp"
#include "specsim/metrics/metrics.hpp"
#include "specsim/runner/runner.hpp"
#include "specsim/runner/sweep.hpp"

using namespace specsim;

namespace {

const char* kPoissonConfig =
    "targets: 2\n"
    "drafts: 4\n"
    "network:\n"
    "  rtt_ms: 10\n"
    "  jitter_ms: 2\n"
    "policies:\n"
    "  routing: jsq\n"
    "  window:\n"
    "    kind: static\n"
    "    gamma: 4\n"
    "workload:\n"
    "  mode: poisson\n"
    "  rate_rps: 40\n"
    "  n_requests: 50\n"
    "  acceptance_rate: 0.8\n"
    "  prompt_median: 12\n"
    "  output_median: 24\n"
    "seed: 7\n"
    "latency_profile:\n"
    "  synth:\n"
    "    target_decode_ms: 10\n"
    "    cost_ratio: 0.1\n";

}  // namespace

TEST_CASE("resolve_config builds topology, profile and synthetic workload") {
    ResolvedConfig rc = resolve_config(yaml::parse_string(kPoissonConfig), true, std::nullopt,
                                       ".");
    CHECK(rc.topology.targets.size() == 2);
    CHECK(rc.topology.drafts.size() == 4);
    CHECK(rc.trace.size() == 50);
    CHECK(rc.seed == 7);
    CHECK(rc.digest.size() == 16);
}

TEST_CASE("identical config and seed give byte-identical reports") {
    yaml::Node config = yaml::parse_string(kPoissonConfig);
    ResolvedConfig rc1 = resolve_config(config, true, std::nullopt, ".");
    ResolvedConfig rc2 = resolve_config(config, true, std::nullopt, ".");
    CHECK(run_simulation(rc1).report_json == run_simulation(rc2).report_json);
}

TEST_CASE("seed override changes the report") {
    yaml::Node config = yaml::parse_string(kPoissonConfig);
    ResolvedConfig a = resolve_config(config, true, 1, ".");
    ResolvedConfig b = resolve_config(config, true, 2, ".");
    CHECK(run_simulation(a).report_json != run_simulation(b).report_json);
}

TEST_CASE("trace-mode config loads records from the referenced file") {
    test_helpers::TempDir tmp;
    SyntheticSpec spec;
    spec.n_requests = 8;
    spec.n_drafts = 2;
    save_trace(generate_synthetic(spec, 3), tmp.file("trace.jsonl"));
    std::string config =
        "targets: 1\ndrafts: 2\n"
        "policies:\n  window:\n    kind: static\n    gamma: 4\n"
        "workload:\n  mode: trace\n  trace: trace.jsonl\n"
        "latency_profile:\n  synth:\n    target_decode_ms: 5\n";
    ResolvedConfig rc = resolve_config(yaml::parse_string(config), true, std::nullopt, tmp.dir());
    CHECK(rc.trace.size() == 8);
    SimulationOutput out = run_simulation(rc);
    auto j = nlohmann::json::parse(out.report_json);
    CHECK(j["requests"].size() == 8);
    CHECK(j["seed"] == kDefaultSeed);  // documented default when omitted
}

TEST_CASE("config errors: missing sections and unknown keys") {
    CHECK_THROWS_AS(resolve_config(yaml::parse_string("targets: 1\npolicies:\n  window: fused\n"),
                                   true, std::nullopt, "."),
                    ConfigError);  // no workload / profile
    std::string bad =
        "targets: 1\npolicies:\n  window: fused\n"
        "workload:\n  mode: poisson\n  rate_rps: 5\n  n_requests: 1\n  unknown_knob: 3\n"
        "latency_profile:\n  synth: {}\n";
    // unknown workload key rejected in strict mode only
    CHECK_THROWS_AS(resolve_config(yaml::parse_string(bad), true, std::nullopt, "."),
                    ConfigError);
    CHECK_NOTHROW(resolve_config(yaml::parse_string(bad), false, std::nullopt, "."));
}

TEST_CASE("sweep: degenerate sweep equals a plain run") {
    yaml::Node sweep_node = yaml::parse_string(std::string("seed: 7\nconfig:\n") + [] {
        std::string indented;
        std::istringstream in(kPoissonConfig);
        std::string line;
        while (std::getline(in, line)) indented += "  " + line + "\n";
        return indented;
    }());
    SweepSpec spec = SweepSpec::from_node(sweep_node, ".");
    CHECK(spec.point_count() == 1);
    SweepResult result = run_sweep(spec, 1, "");
    REQUIRE(result.points.size() == 1);
    CHECK_FALSE(result.points[0].failed);

    ResolvedConfig rc = resolve_config(yaml::parse_string(kPoissonConfig), true, 7, ".");
    RunAggregates direct = aggregate_run(run_simulation(rc).result);
    CHECK(result.points[0].mean_throughput_rps == doctest::Approx(direct.throughput_rps));
    CHECK(result.points[0].mean_tpot_ms == doctest::Approx(direct.mean_tpot_ms));
}

TEST_CASE("sweep: permuting axis order never changes a point's report") {
    test_helpers::TempDir tmp;
    auto make_spec = [&](bool flipped) {
        yaml::Node node = yaml::Node::make_map();
        node.set("seed", yaml::Node::make_int(5));
        yaml::Node config = yaml::parse_string(kPoissonConfig);
        node.set("config", config);
        yaml::Node axes = yaml::Node::make_map();
        yaml::Node rtts = yaml::Node::make_seq(
            {yaml::Node::make_int(5), yaml::Node::make_int(20)});
        yaml::Node gammas = yaml::Node::make_seq(
            {yaml::Node::make_int(2), yaml::Node::make_int(6)});
        if (flipped) {
            axes.set("policies.window.gamma", gammas);
            axes.set("network.rtt_ms", rtts);
        } else {
            axes.set("network.rtt_ms", rtts);
            axes.set("policies.window.gamma", gammas);
        }
        node.set("axes", axes);
        return SweepSpec::from_node(node, ".");
    };
    SweepResult a = run_sweep(make_spec(false), 2, "");
    SweepResult b = run_sweep(make_spec(true), 2, "");
    REQUIRE(a.points.size() == 4);
    REQUIRE(b.points.size() == 4);
    for (const auto& pa : a.points) {
        bool matched = false;
        for (const auto& pb : b.points) {
            if (pb.point_id != pa.point_id) continue;
            matched = true;
            CHECK(pa.mean_throughput_rps == doctest::Approx(pb.mean_throughput_rps));
            CHECK(pa.mean_tpot_ms == doctest::Approx(pb.mean_tpot_ms));
            CHECK(pa.mean_ttft_ms == doctest::Approx(pb.mean_ttft_ms));
        }
        CHECK(matched);
    }
}

TEST_CASE("sweep summary is recomputable from the report files") {
    test_helpers::TempDir tmp;
    yaml::Node node = yaml::Node::make_map();
    node.set("seed", yaml::Node::make_int(9));
    node.set("config", yaml::parse_string(kPoissonConfig));
    yaml::Node axes = yaml::Node::make_map();
    axes.set("network.rtt_ms",
             yaml::Node::make_seq({yaml::Node::make_int(5), yaml::Node::make_int(30)}));
    node.set("axes", axes);
    yaml::Node reps = yaml::Node::make_int(2);
    node.set("repetitions", reps);
    SweepSpec spec = SweepSpec::from_node(node, ".");
    SweepResult result = run_sweep(spec, 1, tmp.dir());
    for (const auto& p : result.points) {
        REQUIRE(p.report_files.size() == 2);
        double thr = 0.0;
        for (const auto& file : p.report_files) {
            auto j = nlohmann::json::parse(test_helpers::slurp(file));
            thr += j["system"]["throughput_rps"].get<double>();
        }
        CHECK(p.mean_throughput_rps == doctest::Approx(thr / 2.0).epsilon(1e-6));
    }
}

TEST_CASE("repetition seeds differ but stay deterministic") {
    CHECK(sweep_point_seed(7, "base", 0) == 7);
    CHECK(sweep_point_seed(7, "base", 1) != 7);
    CHECK(sweep_point_seed(7, "a=1", 0) == sweep_point_seed(7, "a=1", 0));
    CHECK(sweep_point_seed(7, "a=1", 0) != sweep_point_seed(7, "a=2", 0));
}
