// specsim command-line front end: single runs, parameter sweeps, dataset
// generation, controller training and policy comparisons.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "specsim/awc/dataset.hpp"
#include "specsim/awc/train.hpp"
#include "specsim/errors.hpp"
#include "specsim/metrics/metrics.hpp"
#include "specsim/runner/runner.hpp"
#include "specsim/runner/sweep.hpp"
#include "specsim/util/json_writer.hpp"

namespace {

using namespace specsim;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string dir_of(const std::string& path) {
    std::filesystem::path p(path);
    auto parent = p.parent_path();
    return parent.empty() ? std::string(".") : parent.string();
}

int default_parallelism() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

struct CommonOpts {
    std::string config;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool lenient = false;
    int parallel = default_parallelism();
};

int cmd_run(const CommonOpts& opts, const std::string& event_log_path) {
    yaml::Node config = parse_config(opts.config);
    ResolvedConfig rc = resolve_config(
        config, !opts.lenient,
        opts.seed_set ? std::optional<std::uint64_t>(opts.seed) : std::nullopt,
        dir_of(opts.config));
    EngineOptions engine_opts;
    engine_opts.collect_event_log = !event_log_path.empty();
    SimulationOutput out = run_simulation(rc, engine_opts);

    std::string report_path = opts.out.empty() ? "report.json" : opts.out;
    write_file(report_path, out.report_json);
    if (opts.format == "csv") {
        write_file(report_path + ".csv", emit_report_csv(out.result.records));
    }
    if (!event_log_path.empty()) {
        std::string log;
        for (const auto& line : out.result.event_log) {
            log += line;
            log += '\n';
        }
        write_file(event_log_path, log);
    }
    RunAggregates agg = aggregate_run(out.result);
    std::printf("completed=%lld throughput_rps=%.3f mean_ttft_ms=%.3f mean_tpot_ms=%.3f -> %s\n",
                static_cast<long long>(agg.completed), agg.throughput_rps, agg.mean_ttft_ms,
                agg.mean_tpot_ms, report_path.c_str());
    return kExitOk;
}

int cmd_sweep(const CommonOpts& opts) {
    yaml::Node node = parse_config(opts.config);
    SweepSpec spec = SweepSpec::from_node(node, dir_of(opts.config));
    std::string out_dir = opts.out.empty() ? "sweep_out" : opts.out;
    std::printf("sweep: %zu points x %d repetitions\n", spec.point_count(), spec.repetitions);
    SweepResult result = run_sweep(spec, opts.parallel, out_dir);
    write_file(out_dir + "/summary.json", sweep_summary_json(result));
    if (opts.format == "csv") {
        write_file(out_dir + "/summary.csv", sweep_summary_csv(result));
    }
    int failures = 0;
    for (const auto& p : result.points) failures += p.failed ? 1 : 0;
    std::printf("sweep complete: %zu points, %d failed -> %s/summary.json\n",
                result.points.size(), failures, out_dir.c_str());
    return failures == 0 ? kExitOk : kExitRuntime;
}

int cmd_gen_dataset(const CommonOpts& opts) {
    DatasetGrid grid;
    if (!opts.config.empty()) grid = DatasetGrid::from_node(parse_config(opts.config));
    if (opts.seed_set) grid.seed = opts.seed;
    std::vector<ScenarioSpec> scenarios = build_scenarios(grid);
    std::string out_dir = opts.out.empty() ? "dataset_out" : opts.out;
    std::filesystem::create_directories(out_dir);
    std::printf("dataset: %zu scenarios x 12 candidates\n", scenarios.size());
    std::vector<SweepSample> samples =
        generate_dataset(scenarios, ObjectiveWeights{}, opts.parallel);
    save_dataset(samples, out_dir + "/dataset.jsonl");
    write_file(out_dir + "/scenarios.jsonl", serialize_scenarios(scenarios));
    std::printf("dataset complete: %zu samples -> %s/dataset.jsonl\n", samples.size(),
                out_dir.c_str());
    return kExitOk;
}

int cmd_train(const std::string& dataset_path, const CommonOpts& opts, int epochs, int hidden) {
    std::vector<SweepSample> dataset = load_dataset(dataset_path);
    TrainHyper hyper;
    hyper.epochs = epochs;
    hyper.hidden = hidden;
    TrainResult result = train_wc_dnn(dataset, hyper, opts.seed_set ? opts.seed : kDefaultSeed);
    std::string out = opts.out.empty() ? "model.json" : opts.out;
    result.model.save(out);
    std::printf("train: %zu samples, mae train=%.4f val=%.4f test=%.4f -> %s\n", dataset.size(),
                result.train_mae, result.val_mae, result.test_mae, out.c_str());
    return kExitOk;
}

int cmd_eval_policy(const std::string& scenarios_path, const std::string& model_path,
                    const std::string& split, const CommonOpts& opts) {
    std::ifstream in(scenarios_path);
    if (!in) throw IoError("cannot open scenarios file: " + scenarios_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::vector<ScenarioSpec> all = parse_scenarios(buf.str());
    std::vector<ScenarioSpec> selected;
    for (const auto& s : all) {
        if (split == "all" || s.split == split) selected.push_back(s);
    }
    if (selected.empty()) throw ConfigError("no scenarios with split '" + split + "'");

    PolicyEval stat = eval_policy_on_scenarios(selected, "static", 4, "", opts.parallel);
    PolicyEval dyn = eval_policy_on_scenarios(selected, "dynamic", 4, "", opts.parallel);
    PolicyEval awc = eval_policy_on_scenarios(selected, "awc", 4, model_path, opts.parallel);

    auto delta = [](double v, double base) {
        return base != 0.0 ? 100.0 * (v - base) / base : 0.0;
    };
    std::printf("policy comparison over %zu scenarios (split=%s):\n", selected.size(),
                split.c_str());
    std::printf("%-10s %18s %18s %18s %12s\n", "policy", "throughput_rps", "mean_ttft_ms",
                "mean_tpot_ms", "mean_gamma");
    for (const PolicyEval* e : {&stat, &dyn, &awc}) {
        std::printf("%-10s %11.3f (%+.1f%%) %11.3f (%+.1f%%) %11.3f (%+.1f%%) %10.2f\n",
                    e->policy.c_str(), e->mean_throughput_rps,
                    delta(e->mean_throughput_rps, stat.mean_throughput_rps), e->mean_ttft_ms,
                    delta(e->mean_ttft_ms, stat.mean_ttft_ms), e->mean_tpot_ms,
                    delta(e->mean_tpot_ms, stat.mean_tpot_ms), e->mean_chosen_gamma);
    }
    if (!opts.out.empty()) {
        JsonWriter w;
        w.begin_object();
        w.key("split").value(split);
        w.key("scenarios").value(static_cast<std::int64_t>(selected.size()));
        w.key("policies").begin_array();
        for (const PolicyEval* e : {&stat, &dyn, &awc}) {
            w.begin_object();
            w.key("policy").value(e->policy);
            w.key("throughput_rps").value_fixed(e->mean_throughput_rps, 6);
            w.key("mean_ttft_ms").value_fixed(e->mean_ttft_ms, 3);
            w.key("mean_tpot_ms").value_fixed(e->mean_tpot_ms, 3);
            w.key("mean_gamma").value_fixed(e->mean_chosen_gamma, 3);
            w.end_object();
        }
        w.end_array();
        w.end_object();
        write_file(opts.out, w.take() + "\n");
    }
    return kExitOk;
}

int cmd_gen_trace(const CommonOpts& opts, double rate, std::int64_t n, double alpha,
                  const std::string& preset, std::int64_t drafts) {
    SyntheticSpec spec;
    spec.rate_rps = rate;
    spec.n_requests = n;
    spec.acceptance_rate = alpha;
    spec.lengths = length_preset(preset);
    spec.n_drafts = drafts;
    std::vector<TraceRecord> records =
        generate_synthetic(spec, opts.seed_set ? opts.seed : kDefaultSeed);
    std::string out = opts.out.empty() ? "trace.jsonl" : opts.out;
    save_trace(records, out);
    std::printf("generated %zu records -> %s\n", records.size(), out.c_str());
    return kExitOk;
}

int cmd_gen_profile(const CommonOpts& opts, double target_decode_ms, double cost_ratio,
                    double batch_coef, double context_coef, double prefill_ms_per_token) {
    LatencyProfile profile = synth_profile(default_synth_spec(
        target_decode_ms, cost_ratio, batch_coef, context_coef, prefill_ms_per_token));
    std::string out = opts.out.empty() ? "profile.json" : opts.out;
    profile.save(out);
    std::printf("profile (target %.3f ms/token, cost ratio %.3f) -> %s\n", target_decode_ms,
                cost_ratio, out.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"request-level simulator for edge-cloud speculative decoding"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string event_log_path, dataset_path, scenarios_path, model_path, split = "test";
    int epochs = 100, hidden = 64;
    double rate = 20.0, alpha = 0.8;
    std::int64_t n_requests = 100, drafts = 1;
    std::string preset = "gsm8k-like";
    double target_decode_ms = 20.0, cost_ratio = 0.1, batch_coef = 0.05, context_coef = 0.3,
           prefill_ms_per_token = 0.2;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opts.config, "config file (YAML)");
        if (needs_config) c->required();
        cmd->add_option("--seed", opts.seed, "run seed")->each([&](const std::string&) {
            opts.seed_set = true;
        });
        cmd->add_option("--out", opts.out, "output path");
        cmd->add_option("--format", opts.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--parallel", opts.parallel, "worker threads for sweeps");
        cmd->add_flag("--lenient", opts.lenient, "ignore unknown config keys");
    };

    CLI::App* run = app.add_subcommand("run", "run one simulation and write a report");
    add_common(run, true);
    run->add_option("--event-log", event_log_path, "write per-transition event log");

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep, true);

    CLI::App* gen_dataset =
        app.add_subcommand("gen-dataset", "sweep window candidates over a scenario grid");
    add_common(gen_dataset, false);

    CLI::App* train = app.add_subcommand("train", "fit the window-control regressor");
    add_common(train, false);
    train->add_option("--dataset", dataset_path, "dataset.jsonl from gen-dataset")->required();
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--hidden", hidden, "hidden width");

    CLI::App* eval = app.add_subcommand("eval-policy", "compare static/dynamic/awc policies");
    add_common(eval, false);
    eval->add_option("--scenarios", scenarios_path, "scenarios.jsonl from gen-dataset")
        ->required();
    eval->add_option("--model", model_path, "trained model file")->required();
    eval->add_option("--split", split, "scenario split: train/val/test/all");

    CLI::App* gen_trace = app.add_subcommand("gen-trace", "generate a synthetic trace");
    add_common(gen_trace, false);
    gen_trace->add_option("--rate", rate, "poisson rate, requests/s");
    gen_trace->add_option("--n", n_requests, "request count");
    gen_trace->add_option("--alpha", alpha, "acceptance probability");
    gen_trace->add_option("--preset", preset, "length preset");
    gen_trace->add_option("--drafts", drafts, "draft pool size for drafter assignment");

    CLI::App* gen_profile = app.add_subcommand("gen-profile", "generate a synthetic profile");
    add_common(gen_profile, false);
    gen_profile->add_option("--target-decode-ms", target_decode_ms, "target per-step decode ms");
    gen_profile->add_option("--cost-ratio", cost_ratio, "draft/target per-token cost ratio");
    gen_profile->add_option("--batch-coef", batch_coef, "batch scaling coefficient");
    gen_profile->add_option("--context-coef", context_coef, "context scaling coefficient");
    gen_profile->add_option("--prefill-ms-per-token", prefill_ms_per_token,
                            "prefill cost per prompt token");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(opts, event_log_path);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (gen_dataset->parsed()) return cmd_gen_dataset(opts);
        if (train->parsed()) return cmd_train(dataset_path, opts, epochs, hidden);
        if (eval->parsed()) return cmd_eval_policy(scenarios_path, model_path, split, opts);
        if (gen_trace->parsed()) return cmd_gen_trace(opts, rate, n_requests, alpha, preset, drafts);
        if (gen_profile->parsed())
            return cmd_gen_profile(opts, target_decode_ms, cost_ratio, batch_coef, context_coef,
                                   prefill_ms_per_token);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitConfig;
    } catch (const UnknownProfileKey& e) {
        std::fprintf(stderr, "profile error: %s\n", e.what());
        return kExitConfig;
    } catch (const CorruptModelFile& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
