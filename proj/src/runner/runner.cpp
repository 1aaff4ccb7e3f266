#include "specsim/runner/runner.hpp"

#include <set>

#include "specsim/errors.hpp"
#include "specsim/util/fnv.hpp"

namespace specsim {

namespace {

std::string join_path(const std::string& base, const std::string& path) {
    if (path.empty() || path.front() == '/' || base.empty() || base == ".") return path;
    return base + "/" + path;
}

void check_workload_keys(const yaml::Node& w, bool strict) {
    if (!strict || !w.is_map()) return;
    static const std::set<std::string> allowed = {
        "mode",         "trace",        "rate_rps",     "n_requests",   "acceptance_rate",
        "preset",       "gen_seed",     "prompt_median", "prompt_sigma", "output_median",
        "output_sigma"};
    for (const auto& kv : w.map) {
        if (!allowed.count(kv.first)) {
            throw ConfigError("unknown key '" + kv.first + "' in workload");
        }
    }
}

LengthDist lengths_from(const yaml::Node& w) {
    LengthDist d;
    if (w.has("preset")) d = length_preset(w.get_string("preset", ""));
    d.prompt_median = w.get_double("prompt_median", d.prompt_median);
    d.prompt_sigma = w.get_double("prompt_sigma", d.prompt_sigma);
    d.output_median = w.get_double("output_median", d.output_median);
    d.output_sigma = w.get_double("output_sigma", d.output_sigma);
    return d;
}

std::shared_ptr<const LatencyProfile> profile_from(const yaml::Node& config, bool strict,
                                                   const std::string& base_dir) {
    const yaml::Node* node = config.find("latency_profile");
    if (!node || node->is_null()) {
        throw ConfigError("config requires 'latency_profile' (a path or an inline synth spec)");
    }
    if (node->is_scalar()) {
        return std::make_shared<LatencyProfile>(
            LatencyProfile::load(join_path(base_dir, node->as_string())));
    }
    if (node->is_map() && node->has("synth")) {
        const yaml::Node& s = node->at("synth");
        if (strict) {
            static const std::set<std::string> allowed = {
                "target_decode_ms", "cost_ratio",          "batch_coef",
                "context_coef",     "prefill_ms_per_token"};
            for (const auto& kv : s.map) {
                if (!allowed.count(kv.first)) {
                    throw ConfigError("unknown key '" + kv.first + "' in latency_profile.synth");
                }
            }
        }
        SynthProfileSpec spec = default_synth_spec(
            s.get_double("target_decode_ms", 20.0), s.get_double("cost_ratio", 0.1),
            s.get_double("batch_coef", 0.05), s.get_double("context_coef", 0.3),
            s.get_double("prefill_ms_per_token", 0.2));
        return std::make_shared<LatencyProfile>(synth_profile(spec));
    }
    throw ConfigError("latency_profile must be a path or {synth: {...}}");
}

}  // namespace

namespace {

ResolvedConfig resolve_common(const yaml::Node& config, bool strict,
                              std::optional<std::uint64_t> seed_override,
                              const std::string& base_dir) {
    ResolvedConfig rc;
    rc.topology = auto_topology(config, strict);
    rc.profile = profile_from(config, strict, base_dir);
    rc.seed = seed_override.value_or(
        static_cast<std::uint64_t>(config.get_int("seed", static_cast<std::int64_t>(kDefaultSeed))));
    rc.digest = to_hex(fnv1a64(config.canonical()));
    if (rc.topology.policy.window.kind == WindowKind::Awc && !rc.topology.drafts.empty()) {
        std::string model_path = rc.topology.policy.window.model_path;
        if (model_path.empty()) {
            throw ConfigError("window policy 'awc' requires policies.window.model");
        }
        rc.awc = std::make_shared<AwcModel>(AwcModel::load(join_path(base_dir, model_path)));
    }
    return rc;
}

}  // namespace

ResolvedConfig resolve_config(const yaml::Node& config, bool strict,
                              std::optional<std::uint64_t> seed_override,
                              const std::string& base_dir) {
    ResolvedConfig rc = resolve_common(config, strict, seed_override, base_dir);

    const yaml::Node* w = config.find("workload");
    if (!w || w->is_null()) throw ConfigError("config requires a 'workload' section");
    check_workload_keys(*w, strict);
    std::string mode = w->get_string("mode", "trace");
    if (mode == "trace") {
        std::string path = w->get_string("trace", "");
        if (path.empty()) throw ConfigError("workload.mode=trace requires workload.trace");
        rc.trace = load_trace(join_path(base_dir, path));
        rc.mode = ArrivalMode{ArrivalModeKind::TraceDriven, 0.0};
    } else if (mode == "poisson") {
        double rate = w->get_double("rate_rps", 0.0);
        if (!(rate > 0.0)) throw ConfigError("workload.mode=poisson requires rate_rps > 0");
        if (w->has("trace")) {
            rc.trace = load_trace(join_path(base_dir, w->get_string("trace", "")));
            rc.mode = ArrivalMode{ArrivalModeKind::Poisson, rate};
        } else {
            SyntheticSpec spec;
            spec.rate_rps = rate;
            spec.n_requests = w->get_int("n_requests", 0);
            spec.acceptance_rate = w->get_double("acceptance_rate", 0.8);
            spec.lengths = lengths_from(*w);
            spec.n_drafts = std::max<std::int64_t>(
                1, static_cast<std::int64_t>(rc.topology.drafts.size()));
            std::uint64_t gen_seed = static_cast<std::uint64_t>(
                w->get_int("gen_seed", static_cast<std::int64_t>(rc.seed)));
            rc.trace = generate_synthetic(spec, gen_seed);
            // timestamps already follow the requested Poisson process
            rc.mode = ArrivalMode{ArrivalModeKind::TraceDriven, 0.0};
        }
    } else {
        throw ConfigError("workload.mode must be 'trace' or 'poisson'");
    }
    return rc;
}

ResolvedConfig resolve_config_with_trace(const yaml::Node& config, bool strict,
                                         std::uint64_t seed, const std::string& base_dir,
                                         std::vector<TraceRecord> trace, ArrivalMode mode) {
    ResolvedConfig rc = resolve_common(config, strict, seed, base_dir);
    rc.trace = std::move(trace);
    rc.mode = mode;
    return rc;
}

SimulationOutput run_simulation(const ResolvedConfig& rc, EngineOptions options) {
    Engine engine(rc.topology, *rc.profile, rc.trace, rc.mode, rc.seed, options, rc.awc.get());
    SimulationOutput out;
    out.result = engine.run();
    out.report_json = emit_report(out.result.records, out.result.system, rc.digest, rc.seed);
    return out;
}

RunAggregates aggregate_run(const RunResult& result) {
    RunAggregates agg;
    agg.completed = static_cast<std::int64_t>(result.records.size());
    agg.throughput_rps = result.system.throughput_rps.value_or(0.0);
    double ttft = 0.0, tpot = 0.0;
    std::int64_t n_tpot = 0;
    for (const auto& r : result.records) {
        ttft += r.ttft_ms;
        if (r.tpot_ms) {
            tpot += *r.tpot_ms;
            ++n_tpot;
        }
    }
    if (!result.records.empty()) agg.mean_ttft_ms = ttft / static_cast<double>(result.records.size());
    if (n_tpot > 0) agg.mean_tpot_ms = tpot / static_cast<double>(n_tpot);
    return agg;
}

}  // namespace specsim
