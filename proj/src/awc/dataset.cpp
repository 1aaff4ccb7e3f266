#include "specsim/awc/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "specsim/errors.hpp"
#include "specsim/sim/rng.hpp"
#include "specsim/util/fnv.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim {

namespace {

std::vector<double> doubles_from(const yaml::Node& node, const char* key,
                                 std::vector<double> dflt) {
    const yaml::Node* n = node.find(key);
    if (!n || n->is_null()) return dflt;
    std::vector<double> out;
    for (const auto& v : n->seq) out.push_back(v.as_double());
    return out;
}

}  // namespace

DatasetGrid DatasetGrid::from_node(const yaml::Node& node) {
    DatasetGrid g;
    if (!node.is_map()) return g;
    g.rtt_ms = doubles_from(node, "rtt_ms", g.rtt_ms);
    g.alpha = doubles_from(node, "alpha", g.alpha);
    g.load_factor = doubles_from(node, "load_factor", g.load_factor);
    if (const yaml::Node* d = node.find("drafts"); d && d->is_seq()) {
        g.drafts.clear();
        for (const auto& v : d->seq) g.drafts.push_back(static_cast<int>(v.as_int()));
    }
    g.cost_ratio = doubles_from(node, "cost_ratio", g.cost_ratio);
    g.target_decode_ms = node.get_double("target_decode_ms", g.target_decode_ms);
    g.n_requests = static_cast<int>(node.get_int("n_requests", g.n_requests));
    g.seed = static_cast<std::uint64_t>(node.get_int("seed", static_cast<std::int64_t>(g.seed)));
    return g;
}

std::vector<ScenarioSpec> build_scenarios(const DatasetGrid& grid) {
    std::vector<ScenarioSpec> out;
    std::uint64_t id = 0;
    for (double rtt : grid.rtt_ms) {
        for (double alpha : grid.alpha) {
            for (double load : grid.load_factor) {
                for (int drafts : grid.drafts) {
                    for (double c : grid.cost_ratio) {
                        ScenarioSpec s;
                        s.scenario_id = id++;
                        s.rtt_ms = rtt;
                        s.jitter_ms = rtt >= 4.0 ? rtt * 0.1 : 0.0;
                        s.alpha = alpha;
                        s.load_factor = load;
                        s.drafts = drafts;
                        s.target_decode_ms = grid.target_decode_ms;
                        s.cost_ratio = c;
                        s.n_requests = grid.n_requests;
                        s.seed = fnv1a64("scenario-" + std::to_string(s.scenario_id), grid.seed);
                        out.push_back(s);
                    }
                }
            }
        }
    }
    // 80/10/10 split assigned per scenario on a seeded shuffle
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream shuffle(grid.seed, "scenario-split");
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = shuffle.uniform_below(i);
        std::swap(order[i - 1], order[j]);
    }
    std::size_t n_train = std::max<std::size_t>(out.empty() ? 0 : 1, (out.size() * 8) / 10);
    std::size_t n_val = out.size() / 10;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        std::string split = rank < n_train ? "train" : (rank < n_train + n_val ? "val" : "test");
        out[order[rank]].split = split;
    }
    return out;
}

std::string serialize_scenarios(const std::vector<ScenarioSpec>& scenarios) {
    std::string out;
    for (const auto& s : scenarios) {
        out += "{\"scenario_id\":" + std::to_string(s.scenario_id);
        out += ",\"split\":\"" + s.split + "\"";
        out += ",\"rtt_ms\":" + format_exact(s.rtt_ms);
        out += ",\"jitter_ms\":" + format_exact(s.jitter_ms);
        out += ",\"alpha\":" + format_exact(s.alpha);
        out += ",\"load_factor\":" + format_exact(s.load_factor);
        out += ",\"drafts\":" + std::to_string(s.drafts);
        out += ",\"targets\":" + std::to_string(s.targets);
        out += ",\"target_decode_ms\":" + format_exact(s.target_decode_ms);
        out += ",\"cost_ratio\":" + format_exact(s.cost_ratio);
        out += ",\"prompt_median\":" + format_exact(s.prompt_median);
        out += ",\"output_median\":" + format_exact(s.output_median);
        out += ",\"n_requests\":" + std::to_string(s.n_requests);
        out += ",\"seed\":" + std::to_string(s.seed);
        out += "}\n";
    }
    return out;
}

std::vector<ScenarioSpec> parse_scenarios(const std::string& text) {
    std::vector<ScenarioSpec> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw ParseError("scenario line " + std::to_string(line_no) + ": invalid JSON");
        }
        ScenarioSpec s;
        s.scenario_id = j.at("scenario_id").get<std::uint64_t>();
        s.split = j.at("split").get<std::string>();
        s.rtt_ms = j.at("rtt_ms").get<double>();
        s.jitter_ms = j.at("jitter_ms").get<double>();
        s.alpha = j.at("alpha").get<double>();
        s.load_factor = j.at("load_factor").get<double>();
        s.drafts = j.at("drafts").get<int>();
        s.targets = j.at("targets").get<int>();
        s.target_decode_ms = j.at("target_decode_ms").get<double>();
        s.cost_ratio = j.at("cost_ratio").get<double>();
        s.prompt_median = j.at("prompt_median").get<double>();
        s.output_median = j.at("output_median").get<double>();
        s.n_requests = j.at("n_requests").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        out.push_back(s);
    }
    return out;
}

std::vector<TraceRecord> scenario_trace(const ScenarioSpec& s) {
    // reference capacity: one verify step at full batch over gamma=4 windows
    SynthProfileSpec prof = default_synth_spec(s.target_decode_ms, s.cost_ratio, 0.05, 0.3);
    LatencyProfile profile = synth_profile(prof);
    double step_ms = profile
                         .predict(OpKind::Verify, BatchShape{8, 4, 128}, kTargetModel,
                                  kCloudHardware)
                         .latency_ms;
    double tokens_per_s = 8.0 * 3.0 * 1000.0 / step_ms;  // ~3 committed per window
    double rate = s.load_factor * tokens_per_s / s.output_median;

    SyntheticSpec spec;
    spec.rate_rps = rate;
    spec.n_requests = s.n_requests;
    spec.acceptance_rate = s.alpha;
    spec.lengths.prompt_median = s.prompt_median;
    spec.lengths.prompt_sigma = 0.3;
    spec.lengths.output_median = s.output_median;
    spec.lengths.output_sigma = 0.3;
    spec.n_drafts = s.drafts;
    return generate_synthetic(spec, s.seed);
}

yaml::Node scenario_config(const ScenarioSpec& s, const std::string& window_kind, int gamma,
                           const std::string& model_path) {
    using yaml::Node;
    Node cfg = Node::make_map();
    cfg.set("targets", Node::make_int(s.targets));
    cfg.set("drafts", Node::make_int(s.drafts));
    Node net = Node::make_map();
    net.set("rtt_ms", Node::make_double(s.rtt_ms));
    net.set("jitter_ms", Node::make_double(s.jitter_ms));
    cfg.set("network", std::move(net));
    Node pol = Node::make_map();
    pol.set("routing", Node::make_string("jsq"));
    Node batching = Node::make_map();
    batching.set("kind", Node::make_string("fifo"));
    batching.set("max_batch_size", Node::make_int(8));
    pol.set("batching", std::move(batching));
    Node window = Node::make_map();
    window.set("kind", Node::make_string(window_kind));
    window.set("gamma", Node::make_int(gamma));
    if (!model_path.empty()) window.set("model", Node::make_string(model_path));
    pol.set("window", std::move(window));
    cfg.set("policies", std::move(pol));
    Node prof = Node::make_map();
    Node synth = Node::make_map();
    synth.set("target_decode_ms", Node::make_double(s.target_decode_ms));
    synth.set("cost_ratio", Node::make_double(s.cost_ratio));
    synth.set("batch_coef", Node::make_double(0.05));
    synth.set("context_coef", Node::make_double(0.3));
    prof.set("synth", std::move(synth));
    cfg.set("latency_profile", std::move(prof));
    cfg.set("seed", Node::make_int(static_cast<std::int64_t>(s.seed)));
    return cfg;
}

namespace {

CandidateOutcome run_candidate(const ScenarioSpec& s, const std::vector<TraceRecord>& trace,
                               const std::string& window_kind, int gamma,
                               const std::string& model_path) {
    yaml::Node cfg = scenario_config(s, window_kind, gamma, model_path);
    // identical workload across candidates
    ResolvedConfig rc = resolve_config_with_trace(cfg, true, s.seed, ".", trace,
                                                  ArrivalMode{ArrivalModeKind::TraceDriven, 0.0});
    EngineOptions opts;
    opts.feature_probe = true;
    SimulationOutput out = run_simulation(rc, opts);
    RunAggregates agg = aggregate_run(out.result);
    CandidateOutcome c;
    c.gamma = window_kind == "fused" ? 1 : gamma;
    c.fused = window_kind == "fused";
    c.throughput_rps = agg.throughput_rps;
    c.mean_ttft_ms = agg.mean_ttft_ms;
    c.mean_tpot_ms = agg.mean_tpot_ms;
    c.mean_features = out.result.mean_features;
    return c;
}

}  // namespace

void score_candidates(std::vector<CandidateOutcome>& candidates,
                      const ObjectiveWeights& weights) {
    auto norm = [&](auto getter) {
        double lo = 1e300, hi = -1e300;
        for (const auto& c : candidates) {
            lo = std::min(lo, getter(c));
            hi = std::max(hi, getter(c));
        }
        std::vector<double> out;
        for (const auto& c : candidates) {
            out.push_back(hi > lo ? (getter(c) - lo) / (hi - lo) : 0.0);
        }
        return out;
    };
    auto tpot_n = norm([](const CandidateOutcome& c) { return c.mean_tpot_ms; });
    auto ttft_n = norm([](const CandidateOutcome& c) { return c.mean_ttft_ms; });
    auto thr_n = norm([](const CandidateOutcome& c) { return c.throughput_rps; });
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].objective = weights.w_tpot * tpot_n[i] + weights.w_ttft * ttft_n[i] -
                                  weights.w_throughput * thr_n[i];
    }
}

int pick_label(const std::vector<CandidateOutcome>& candidates) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
        const auto& c = candidates[static_cast<std::size_t>(i)];
        const auto& b = candidates[static_cast<std::size_t>(best)];
        if (c.objective < b.objective || (c.objective == b.objective && c.gamma < b.gamma)) {
            best = i;
        }
    }
    return candidates[static_cast<std::size_t>(best)].gamma;
}

ScenarioSweepResult sweep_scenario(const ScenarioSpec& scenario,
                                   const ObjectiveWeights& weights) {
    ScenarioSweepResult result;
    result.scenario = scenario;
    std::vector<TraceRecord> trace = scenario_trace(scenario);
    for (int gamma = 2; gamma <= 12; ++gamma) {
        result.candidates.push_back(run_candidate(scenario, trace, "static", gamma, ""));
    }
    result.candidates.push_back(run_candidate(scenario, trace, "fused", 4, ""));
    score_candidates(result.candidates, weights);
    result.label_gamma = pick_label(result.candidates);
    return result;
}

std::vector<SweepSample> generate_dataset(const std::vector<ScenarioSpec>& scenarios,
                                          const ObjectiveWeights& weights, int parallelism,
                                          std::vector<ScenarioSweepResult>* sweeps_out) {
    std::vector<ScenarioSweepResult> sweeps(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            sweeps[i] = sweep_scenario(scenarios[i], weights);
        }
    };
    int width = std::max(1, parallelism);
    if (width == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < width; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<SweepSample> samples;
    samples.reserve(scenarios.size() * 12);
    for (const auto& sweep : sweeps) {
        for (const auto& c : sweep.candidates) {
            SweepSample s;
            s.scenario_id = sweep.scenario.scenario_id;
            s.split = sweep.scenario.split;
            s.features = c.mean_features;
            s.candidate_gamma = c.gamma;
            s.candidate_fused = c.fused;
            s.objective = c.objective;
            s.label_gamma = sweep.label_gamma;
            samples.push_back(std::move(s));
        }
    }
    if (sweeps_out) *sweeps_out = std::move(sweeps);
    return samples;
}

PolicyEval eval_policy_on_scenarios(const std::vector<ScenarioSpec>& scenarios,
                                    const std::string& window_kind, int gamma,
                                    const std::string& model_path, int parallelism) {
    PolicyEval eval;
    eval.policy = window_kind;
    if (scenarios.empty()) return eval;
    std::vector<RunAggregates> aggs(scenarios.size());
    std::vector<double> mean_gamma(scenarios.size(), 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            const ScenarioSpec& s = scenarios[i];
            std::vector<TraceRecord> trace = scenario_trace(s);
            yaml::Node cfg = scenario_config(s, window_kind, gamma, model_path);
            ResolvedConfig rc = resolve_config_with_trace(
                cfg, true, s.seed, ".", std::move(trace),
                ArrivalMode{ArrivalModeKind::TraceDriven, 0.0});
            SimulationOutput out = run_simulation(rc);
            aggs[i] = aggregate_run(out.result);
            double g_sum = 0.0;
            std::int64_t g_n = 0;
            for (const auto& r : out.result.records) {
                for (int g : r.gamma_sequence) {
                    g_sum += g == 0 ? 1.0 : static_cast<double>(g);  // fused counts as 1
                    ++g_n;
                }
            }
            mean_gamma[i] = g_n > 0 ? g_sum / static_cast<double>(g_n) : 0.0;
        }
    };
    int width = std::max(1, parallelism);
    if (width == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < width; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        eval.mean_throughput_rps += aggs[i].throughput_rps;
        eval.mean_ttft_ms += aggs[i].mean_ttft_ms;
        eval.mean_tpot_ms += aggs[i].mean_tpot_ms;
        eval.mean_chosen_gamma += mean_gamma[i];
    }
    double n = static_cast<double>(scenarios.size());
    eval.mean_throughput_rps /= n;
    eval.mean_ttft_ms /= n;
    eval.mean_tpot_ms /= n;
    eval.mean_chosen_gamma /= n;
    return eval;
}

}  // namespace specsim
