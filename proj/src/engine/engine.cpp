#include "specsim/engine/engine.hpp"

#include <algorithm>

#include "specsim/awc/features.hpp"
#include "specsim/errors.hpp"

namespace specsim {

SimTime net_delay(const LinkSpec& link, RngStream& jitter_rng) {
    double jitter = jitter_rng.uniform(-link.jitter_ms / 2.0, link.jitter_ms / 2.0);
    double ms = link.rtt_ms / 2.0 + jitter;
    if (ms < 0.0) ms = 0.0;
    return ms_to_us(ms);
}

std::pair<int, int> consume_acceptance(const std::vector<std::uint8_t>& bits,
                                       std::size_t& cursor, int gamma) {
    if (bits.empty()) throw ValidationError("verify on an empty acceptance sequence");
    int accepted = 0, consumed = 0;
    while (consumed < gamma) {
        std::uint8_t bit = bits[cursor % bits.size()];
        ++cursor;
        ++consumed;
        if (bit) {
            ++accepted;
        } else {
            break;
        }
    }
    return {accepted, consumed};
}

namespace {

enum class ReqPhase : std::uint8_t {
    Arrived,
    Routed,
    QueuedPrefill,
    Speculating,
    InFlightToTarget,
    Verifying,
    InFlightToDraft,
    Done,
};

const char* phase_name(ReqPhase p) {
    switch (p) {
        case ReqPhase::Arrived: return "arrived";
        case ReqPhase::Routed: return "routed";
        case ReqPhase::QueuedPrefill: return "queued_prefill";
        case ReqPhase::Speculating: return "speculating";
        case ReqPhase::InFlightToTarget: return "inflight_to_target";
        case ReqPhase::Verifying: return "verifying";
        case ReqPhase::InFlightToDraft: return "inflight_to_draft";
        case ReqPhase::Done: return "done";
    }
    return "?";
}

struct WorkItem {
    OpKind op = OpKind::Prefill;
    std::uint64_t request_id = 0;
    int tokens = 1;           // prompt (prefill), gamma (draft decode/verify), 1 (fused step)
    std::int64_t context = 0;
    SimTime enqueue_time = 0;
    bool via_network = false;
};

struct Server {
    Role role = Role::Target;
    int id = 0;
    const DeviceSpec* spec = nullptr;
    std::deque<WorkItem> queue;
    bool busy = false;
    std::vector<WorkItem> running;  // batch being computed
    std::uint64_t batch_token = 0;
    std::int64_t busy_us = 0;
    bool window_armed = false;
    std::uint64_t window_gen = 0;
    // drafts serve one request session at a time, start to finish
    std::deque<std::uint64_t> sessions;
    std::int64_t active_session = -1;
};

struct RequestState {
    std::uint64_t id = 0;
    const TraceRecord* trace = nullptr;
    ReqPhase phase = ReqPhase::Arrived;
    int draft_id = -1;
    int target_id = -1;
    std::int64_t tokens_done = 0;
    std::size_t accept_cursor = 0;
    SimTime arrival = -1, first_token = -1, completion = -1;
    bool draft_prefill_done = false;
    bool target_prefill_done = false;
    bool fused = false;  // current execution mode
    int pending_gamma = 0;
    SimTime out_delay_us = 0;   // draft->target leg of the in-flight exchange
    SimTime back_delay_us = 0;  // target->draft leg
    int last_accepted = 0;
    int last_committed_raw = 0;
    std::int64_t proposed_total = 0, accepted_total = 0;
    std::vector<int> gamma_seq;      // 0 marks a fused step
    std::vector<int> committed_seq;  // aligned with gamma_seq
};

// NetArrive payload tags
constexpr std::uint64_t kMsgPromptToTarget = 0;
constexpr std::uint64_t kMsgProposalToTarget = 1;
constexpr std::uint64_t kMsgResultToDraft = 2;

// ComputeDone / BatchReady payload: role tag in the high bit of `a`
constexpr std::uint64_t kDraftFlag = 1ULL << 32;

}  // namespace

struct Engine::Impl {
    const Topology& topo;
    const LatencyProfile& profile;
    std::vector<TraceRecord> trace;
    ArrivalMode mode;
    std::uint64_t seed;
    EngineOptions options;
    const AwcModel* awc_model;

    SimKernel kernel;
    RngStream routing_rng;
    RngStream jitter_rng;
    RngStream arrivals_rng;

    std::vector<Server> targets;
    std::vector<Server> drafts;
    std::vector<RequestState> requests;

    MetricsCollector metrics;
    RoundRobinState rr_state;
    std::vector<DynamicWindowState> dynamic_state;  // per (draft, target) pair
    std::vector<SmootherState> smoother_state;      // per pair
    SmootherConfig smoother_cfg;

    std::vector<std::string> event_log;
    std::vector<BusyInterval> busy_intervals;
    std::array<double, 5> feature_sum{};
    std::int64_t feature_samples = 0;

    bool fused_everything;  // fused window policy or an empty draft pool

    Impl(const Topology& topo_in, const LatencyProfile& profile_in,
         std::vector<TraceRecord> trace_in, ArrivalMode mode_in, std::uint64_t seed_in,
         EngineOptions options_in, const AwcModel* awc_in)
        : topo(topo_in),
          profile(profile_in),
          trace(std::move(trace_in)),
          mode(mode_in),
          seed(seed_in),
          options(options_in),
          awc_model(awc_in),
          routing_rng(seed_in, "routing"),
          jitter_rng(seed_in, "jitter"),
          arrivals_rng(seed_in, "arrivals"),
          metrics(static_cast<int>(topo_in.drafts.size()),
                  static_cast<int>(topo_in.targets.size()), topo_in.policy.queue_capacity,
                  topo_in.policy.window.gamma, cold_rtt_table(topo_in)) {
        const auto& policy = topo.policy;
        fused_everything = policy.window.kind == WindowKind::Fused || topo.drafts.empty();
        if (policy.window.kind == WindowKind::Awc && !fused_everything && !awc_model) {
            throw ConfigError("awc window policy requires a trained model");
        }
        for (const auto& d : topo.targets) {
            targets.push_back(Server{Role::Target, d.device_id, &d, {}, false, {}, 0, 0,
                                     false, 0, {}, -1});
            if (!profile.has_grid(d.model_name, d.hardware_name, OpKind::Decode) ||
                !profile.has_grid(d.model_name, d.hardware_name, OpKind::Prefill)) {
                throw UnknownProfileKey("no latency profile for target (" + d.model_name + ", " +
                                        d.hardware_name + ")");
            }
        }
        for (const auto& d : topo.drafts) {
            drafts.push_back(Server{Role::Draft, d.device_id, &d, {}, false, {}, 0, 0,
                                    false, 0, {}, -1});
            if (!fused_everything &&
                (!profile.has_grid(d.model_name, d.hardware_name, OpKind::Decode) ||
                 !profile.has_grid(d.model_name, d.hardware_name, OpKind::Prefill))) {
                throw UnknownProfileKey("no latency profile for draft (" + d.model_name + ", " +
                                        d.hardware_name + ")");
            }
        }
        if (!topo.drafts.empty()) validate_drafter_ids(trace, static_cast<std::int64_t>(topo.drafts.size()));
        std::size_t n_pairs = topo.drafts.size() * topo.targets.size();
        dynamic_state.assign(n_pairs, DynamicWindowState{policy.window.gamma});
        smoother_state.assign(n_pairs, SmootherState{});
        smoother_cfg.gamma_min = policy.window.gamma_min;
        smoother_cfg.gamma_max = policy.window.gamma_max;
    }

    static std::vector<double> cold_rtt_table(const Topology& t) {
        std::vector<double> out;
        out.reserve(t.drafts.size() * t.targets.size());
        for (std::size_t d = 0; d < t.drafts.size(); ++d) {
            for (std::size_t m = 0; m < t.targets.size(); ++m) {
                out.push_back(t.link(static_cast<int>(d), static_cast<int>(m)).rtt_ms);
            }
        }
        return out;
    }

    std::size_t pair_index(int draft_id, int target_id) const {
        return static_cast<std::size_t>(draft_id) * topo.targets.size() +
               static_cast<std::size_t>(target_id);
    }

    void log_transition(const RequestState& req, const char* detail) {
        if (!options.collect_event_log) return;
        event_log.push_back("t_us=" + std::to_string(kernel.now()) + " req=" +
                            std::to_string(req.id) + " phase=" + phase_name(req.phase) +
                            " server=d" + std::to_string(req.draft_id) + "/t" +
                            std::to_string(req.target_id) + " " + detail);
    }

    // ------------------------------------------------------------------
    // setup
    // ------------------------------------------------------------------
    void schedule_arrivals() {
        if (mode.kind == ArrivalModeKind::Poisson && !(mode.rate_rps > 0.0)) {
            throw ValidationError("poisson arrival mode requires a positive rate");
        }
        double clock_ms = 0.0;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            SimTime t;
            if (mode.kind == ArrivalModeKind::TraceDriven) {
                t = trace[i].arrival_us;
            } else {
                clock_ms += arrivals_rng.exponential(1000.0 / mode.rate_rps);
                t = ms_to_us(clock_ms);
            }
            kernel.schedule(t, EventKind::RequestArrival, i);
        }
        requests.resize(trace.size());
        for (std::size_t i = 0; i < trace.size(); ++i) {
            requests[i].id = i;
            requests[i].trace = &trace[i];
        }
    }

    // ------------------------------------------------------------------
    // event dispatch
    // ------------------------------------------------------------------
    void handle(const Event& ev) {
        switch (ev.kind) {
            case EventKind::RequestArrival:
                on_arrival(requests[ev.a]);
                break;
            case EventKind::IterationStart: {
                RequestState& req = requests[ev.a];
                begin_iteration(req, decide_window(req));
                break;
            }
            case EventKind::NetArrive:
                on_net_arrive(ev.b, requests[ev.a]);
                break;
            case EventKind::ComputeDone:
                on_compute_done(server_from_code(ev.a));
                break;
            case EventKind::BatchReady: {
                Server& s = server_from_code(ev.a);
                if (s.window_armed && s.window_gen == ev.b) {
                    s.window_armed = false;
                    try_dispatch(s, /*window_expired=*/true);
                }
                break;
            }
        }
    }

    Server& server_from_code(std::uint64_t code) {
        if (code & kDraftFlag) return drafts[code & ~kDraftFlag];
        return targets[code];
    }

    static std::uint64_t server_code(const Server& s) {
        return s.role == Role::Draft ? (static_cast<std::uint64_t>(s.id) | kDraftFlag)
                                     : static_cast<std::uint64_t>(s.id);
    }

    // ------------------------------------------------------------------
    // lifecycle stages
    // ------------------------------------------------------------------
    void on_arrival(RequestState& req) {
        req.arrival = kernel.now();
        req.phase = ReqPhase::Routed;
        if (!topo.drafts.empty()) req.draft_id = static_cast<int>(req.trace->drafter_id);
        req.target_id = route();
        metrics.on_route(req.target_id, req.arrival);
        log_transition(req, "routed");

        req.phase = ReqPhase::QueuedPrefill;
        if (fused_everything) {
            req.fused = true;
            // co-located execution: the prompt is prefilled locally
            push_work(targets[req.target_id],
                      WorkItem{OpKind::Prefill, req.id, prompt_tokens(req), 0, kernel.now(),
                               false});
        } else {
            Server& draft = drafts[req.draft_id];
            draft.sessions.push_back(req.id);
            activate_next_session(draft);
            // ship the prompt to the verifier in parallel
            SimTime delay = net_delay(topo.link(req.draft_id, req.target_id), jitter_rng);
            kernel.schedule(kernel.now() + delay, EventKind::NetArrive, req.id,
                            kMsgPromptToTarget);
        }
    }

    int route() {
        switch (topo.policy.routing) {
            case RoutingKind::Random:
                return route_random(static_cast<int>(targets.size()), routing_rng);
            case RoutingKind::RoundRobin:
                return route_round_robin(rr_state, static_cast<int>(targets.size()));
            case RoutingKind::Jsq: {
                std::vector<int> depths(targets.size());
                for (std::size_t t = 0; t < targets.size(); ++t) {
                    depths[t] = metrics.queue_depth(static_cast<int>(t));
                }
                return route_jsq(depths);
            }
        }
        throw ConfigError("unhandled routing policy");
    }

    void activate_next_session(Server& draft) {
        if (draft.active_session >= 0 || draft.sessions.empty()) return;
        draft.active_session = static_cast<std::int64_t>(draft.sessions.front());
        draft.sessions.pop_front();
        RequestState& req = requests[static_cast<std::size_t>(draft.active_session)];
        push_work(draft, WorkItem{OpKind::Prefill, req.id, prompt_tokens(req), 0, kernel.now(),
                                  false});
    }

    static int prompt_tokens(const RequestState& req) {
        return static_cast<int>(req.trace->prompt_length);
    }

    std::int64_t context_of(const RequestState& req) const {
        return req.trace->prompt_length + req.tokens_done;
    }

    // Window decision for the next iteration of a distributed-capable request.
    WindowDecision decide_window(RequestState& req) {
        const WindowConfig& wc = topo.policy.window;
        if (req.draft_id < 0) return WindowDecision::fused_mode();
        std::size_t pair = pair_index(req.draft_id, req.target_id);
        WindowDecision decision;
        switch (wc.kind) {
            case WindowKind::Static:
                decision = window_static(wc.gamma);
                break;
            case WindowKind::Dynamic:
                decision = window_dynamic(metrics.acceptance_recent(req.draft_id, req.target_id),
                                          dynamic_state[pair], wc.gamma_min, wc.gamma_max);
                break;
            case WindowKind::Awc: {
                double raw = awc_model->predict_gamma(
                    extract_features(metrics, req.draft_id, req.target_id).as_array());
                decision = stabilized_decide(raw, smoother_state[pair], smoother_cfg);
                break;
            }
            case WindowKind::Fused:
                decision = WindowDecision::fused_mode();
                break;
        }
        return decision;
    }

    void probe_features(const RequestState& req) {
        if (!options.feature_probe || req.draft_id < 0) return;
        auto f = extract_features(metrics, req.draft_id, req.target_id).as_array();
        for (std::size_t i = 0; i < 5; ++i) feature_sum[i] += f[i];
        ++feature_samples;
    }

    void begin_iteration(RequestState& req, const WindowDecision& decision) {
        if (req.phase == ReqPhase::Done) return;
        probe_features(req);  // before gamma_prev is overwritten below
        if (req.draft_id >= 0 && req.target_id >= 0) {
            metrics.on_gamma_chosen(req.draft_id, req.target_id,
                                    decision.fused ? 1 : decision.gamma);
        }
        if (decision.fused) {
            req.fused = true;
            req.gamma_seq.push_back(0);
            push_work(targets[req.target_id],
                      WorkItem{OpKind::Decode, req.id, 1, context_of(req), kernel.now(), false});
        } else {
            req.fused = false;
            req.gamma_seq.push_back(decision.gamma);
            req.pending_gamma = decision.gamma;
            req.phase = ReqPhase::Speculating;
            log_transition(req, "speculating");
            push_work(drafts[req.draft_id], WorkItem{OpKind::Decode, req.id, decision.gamma,
                                                     context_of(req), kernel.now(), false});
        }
    }

    void on_net_arrive(std::uint64_t msg, RequestState& req) {
        switch (msg) {
            case kMsgPromptToTarget:
                push_work(targets[req.target_id],
                          WorkItem{OpKind::Prefill, req.id, prompt_tokens(req), 0, kernel.now(),
                                   true});
                break;
            case kMsgProposalToTarget:
                req.phase = ReqPhase::Verifying;
                log_transition(req, "proposal_at_target");
                push_work(targets[req.target_id],
                          WorkItem{OpKind::Verify, req.id, req.pending_gamma, context_of(req),
                                   kernel.now(), true});
                break;
            case kMsgResultToDraft:
                on_result_at_draft(req);
                break;
            default:
                throw ValidationError("unknown network message tag");
        }
    }

    void on_result_at_draft(RequestState& req) {
        metrics.on_rtt_sample(req.draft_id, req.target_id,
                              us_to_ms(req.out_delay_us + req.back_delay_us));
        commit_tokens(req, req.last_committed_raw);
        if (req.phase != ReqPhase::Done) {
            kernel.schedule(kernel.now(), EventKind::IterationStart, req.id);
        }
    }

    void commit_tokens(RequestState& req, int committed_raw) {
        std::int64_t remaining = req.trace->output_length - req.tokens_done;
        int committed = static_cast<int>(
            std::min<std::int64_t>(static_cast<std::int64_t>(committed_raw), remaining));
        req.tokens_done += committed;
        req.committed_seq.push_back(committed);
        if (req.first_token < 0) req.first_token = kernel.now();
        if (req.tokens_done >= req.trace->output_length) {
            finish_request(req);
        }
    }

    void finish_request(RequestState& req) {
        req.completion = kernel.now();
        if (req.first_token < 0) req.first_token = req.completion;
        req.phase = ReqPhase::Done;
        log_transition(req, "done");
        RequestTimestamps ts{req.arrival, req.first_token, req.completion};
        metrics.add_record(
            finalize_request(req.id, topo.drafts.empty() ? -1 : req.trace->drafter_id,
                             req.target_id, req.trace->prompt_length, req.trace->output_length,
                             ts, req.proposed_total, req.accepted_total, req.gamma_seq,
                             req.committed_seq),
            req.target_id, req.completion);
        if (req.draft_id >= 0) {
            Server& draft = drafts[req.draft_id];
            if (draft.active_session == static_cast<std::int64_t>(req.id)) {
                draft.active_session = -1;
                activate_next_session(draft);
            }
        }
    }

    // ------------------------------------------------------------------
    // server scheduling
    // ------------------------------------------------------------------
    void push_work(Server& server, WorkItem item) {
        server.queue.push_back(item);
        try_dispatch(server, false);
    }

    bool item_eligible(const Server& server, const WorkItem& item) const {
        if (server.role == Role::Draft) return true;
        if (item.op == OpKind::Prefill) return true;
        // target-side verify/decode needs the verifier KV state
        return requests[item.request_id].target_prefill_done;
    }

    void try_dispatch(Server& server, bool window_expired) {
        if (server.busy || server.queue.empty()) return;

        std::vector<BatchCandidate> candidates;  // eligible items of the head kind
        OpKind kind = OpKind::Prefill;
        bool have_kind = false;
        for (std::size_t i = 0; i < server.queue.size(); ++i) {
            const WorkItem& item = server.queue[i];
            if (!item_eligible(server, item)) continue;
            if (!have_kind) {
                kind = item.op;
                have_kind = true;
            }
            if (item.op != kind) continue;
            std::int64_t work_len = item.op == OpKind::Prefill
                                        ? item.tokens
                                        : requests[item.request_id].trace->output_length -
                                              requests[item.request_id].tokens_done;
            candidates.push_back(BatchCandidate{i, work_len});
        }
        if (candidates.empty()) return;

        const BatchingConfig& bc = topo.policy.batching;
        int max_batch = server.role == Role::Draft ? topo.policy.draft_max_batch
                                                   : bc.max_batch_size;
        if (server.role == Role::Target && bc.batching_window_us > 0 && !window_expired &&
            static_cast<int>(candidates.size()) < max_batch) {
            if (!server.window_armed) {
                server.window_armed = true;
                ++server.window_gen;
                kernel.schedule(kernel.now() + bc.batching_window_us, EventKind::BatchReady,
                                server_code(server), server.window_gen);
            }
            return;
        }
        server.window_armed = false;

        std::vector<std::size_t> picked;
        if (server.role == Role::Draft || bc.kind == BatchingKind::Fifo) {
            picked = batch_fifo(candidates, max_batch);
        } else {
            picked = batch_lab(candidates, max_batch, bc.similarity_fraction);
        }

        // assemble the batch and remove members from the queue (stable)
        std::vector<WorkItem> batch;
        batch.reserve(picked.size());
        std::vector<bool> take(server.queue.size(), false);
        for (std::size_t qi : picked) take[qi] = true;
        std::deque<WorkItem> rest;
        for (std::size_t i = 0; i < server.queue.size(); ++i) {
            if (take[i]) {
                batch.push_back(server.queue[i]);
            } else {
                rest.push_back(server.queue[i]);
            }
        }
        server.queue.swap(rest);

        BatchShape shape;
        shape.batch_size = static_cast<int>(batch.size());
        shape.tokens_per_request = 1;
        shape.context_length = 0;
        for (const WorkItem& item : batch) {
            shape.tokens_per_request = std::max(shape.tokens_per_request, item.tokens);
            shape.context_length = std::max(shape.context_length, item.context);
            if (item.via_network) metrics.on_net_queue_wait(kernel.now() - item.enqueue_time);
        }
        double latency_ms =
            profile.predict(kind, shape, server.spec->model_name, server.spec->hardware_name)
                .latency_ms;
        SimTime latency_us = ms_to_us(latency_ms);
        if (latency_us < 1) latency_us = 1;  // keep busy intervals well ordered

        server.busy = true;
        server.running = std::move(batch);
        ++server.batch_token;
        server.busy_us += latency_us;
        busy_intervals.push_back(
            BusyInterval{server.role, server.id, kernel.now(), kernel.now() + latency_us});
        kernel.schedule(kernel.now() + latency_us, EventKind::ComputeDone, server_code(server),
                        server.batch_token);
    }

    void on_compute_done(Server& server) {
        server.busy = false;
        std::vector<WorkItem> batch = std::move(server.running);
        server.running.clear();
        for (const WorkItem& item : batch) {
            RequestState& req = requests[item.request_id];
            if (server.role == Role::Draft) {
                if (item.op == OpKind::Prefill) {
                    req.draft_prefill_done = true;
                    if (req.trace->output_length > 0) {
                        kernel.schedule(kernel.now(), EventKind::IterationStart, req.id);
                    }
                } else {
                    send_proposal(req);
                }
            } else {
                on_target_item_done(req, item);
            }
        }
        try_dispatch(server, false);
    }

    void send_proposal(RequestState& req) {
        req.phase = ReqPhase::InFlightToTarget;
        log_transition(req, "proposal_sent");
        req.out_delay_us = net_delay(topo.link(req.draft_id, req.target_id), jitter_rng);
        kernel.schedule(kernel.now() + req.out_delay_us, EventKind::NetArrive, req.id,
                        kMsgProposalToTarget);
    }

    void on_target_item_done(RequestState& req, const WorkItem& item) {
        switch (item.op) {
            case OpKind::Prefill: {
                req.target_prefill_done = true;
                if (req.trace->output_length == 0) {
                    if (req.phase != ReqPhase::Done) finish_request(req);
                    break;
                }
                if (req.fused && fused_everything) {
                    // fused-from-start: begin the local decode loop
                    begin_iteration(req, WindowDecision::fused_mode());
                }
                // distributed requests proceed when their proposals become
                // eligible; nothing to do here
                break;
            }
            case OpKind::Verify: {
                auto [accepted, consumed] = consume_acceptance(req.trace->acceptance_seq,
                                                               req.accept_cursor,
                                                               item.tokens);
                req.last_accepted = accepted;
                req.last_committed_raw = accepted + 1;  // correction or bonus token
                // acceptance rate counts examined drafts only: tokens after
                // the first reject were never evaluated by the verifier
                req.proposed_total += consumed;
                req.accepted_total += accepted;
                metrics.on_verify(req.draft_id, req.target_id, consumed, accepted);
                req.back_delay_us = net_delay(topo.link(req.draft_id, req.target_id), jitter_rng);
                req.phase = ReqPhase::InFlightToDraft;
                log_transition(req, "verify_done");
                kernel.schedule(kernel.now() + req.back_delay_us, EventKind::NetArrive, req.id,
                                kMsgResultToDraft);
                break;
            }
            case OpKind::Decode: {
                // fused autoregressive step: one committed token, no network
                commit_tokens(req, 1);
                if (req.phase == ReqPhase::Done) break;
                if (fused_everything || req.draft_id < 0) {
                    begin_iteration(req, WindowDecision::fused_mode());
                } else {
                    // per-iteration policy check (AWC may switch back)
                    begin_iteration(req, decide_window(req));
                }
                break;
            }
        }
    }

    RunResult finish() {
        RunResult result;
        result.records = metrics.records();
        std::sort(result.records.begin(), result.records.end(),
                  [](const MetricsRecord& a, const MetricsRecord& b) {
                      return a.request_id < b.request_id;
                  });
        std::vector<std::int64_t> busy;
        busy.reserve(targets.size());
        for (const auto& t : targets) busy.push_back(t.busy_us);
        result.system = metrics.system(busy);
        result.event_log = std::move(event_log);
        result.busy_intervals = std::move(busy_intervals);
        result.mean_features = feature_sum;
        if (feature_samples > 0) {
            for (auto& v : result.mean_features) v /= static_cast<double>(feature_samples);
        }
        result.feature_samples = feature_samples;
        result.events_processed = kernel.events_processed();
        result.end_time = kernel.now();
        return result;
    }
};

Engine::Engine(const Topology& topology, const LatencyProfile& profile,
               std::vector<TraceRecord> trace, ArrivalMode mode, std::uint64_t seed,
               EngineOptions options, const AwcModel* awc_model)
    : impl_(std::make_unique<Impl>(topology, profile, std::move(trace), mode, seed, options,
                                    awc_model)) {}

Engine::~Engine() = default;

RunResult Engine::run() {
    impl_->kernel.set_handler([this](const Event& ev) { impl_->handle(ev); });
    impl_->schedule_arrivals();
    impl_->kernel.run_until();
    return impl_->finish();
}

}  // namespace specsim
