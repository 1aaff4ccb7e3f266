#pragma once

#include <cstdint>
#include <vector>

#include "specsim/config/topology.hpp"
#include "specsim/sim/rng.hpp"

namespace specsim {

// Routing: choose a target cluster for an arriving request. All routing
// policies are pure functions of their inputs, so replays with the same
// snapshot/state/stream reproduce the same decisions.

int route_random(int n_targets, RngStream& rng);

struct RoundRobinState {
    std::uint64_t counter = 0;  // global across all drafters
};
int route_round_robin(RoundRobinState& state, int n_targets);

// Argmin of queue depth; ties break toward the lowest target id.
int route_jsq(const std::vector<int>& queue_depths);

// Batching: pick queue positions to form one batch. `work_length` is the
// policy's notion of length: remaining output tokens for decode/verify
// items, prompt length for prefill items.
struct BatchCandidate {
    std::size_t queue_index = 0;
    std::int64_t work_length = 0;
};

std::vector<std::size_t> batch_fifo(const std::vector<BatchCandidate>& queue, int max_batch_size);

// Head-of-line request is always included; the rest of the queue is scanned
// in order for lengths within similarity_fraction of the head's.
std::vector<std::size_t> batch_lab(const std::vector<BatchCandidate>& queue, int max_batch_size,
                                   double similarity_fraction);

// Window control: choose the speculation window and execution mode for the
// next iteration of a request.
struct WindowDecision {
    bool fused = false;
    int gamma = 1;  // meaningful when !fused; always within [gamma_min, gamma_max]

    static WindowDecision distributed(int g) { return WindowDecision{false, g}; }
    static WindowDecision fused_mode() { return WindowDecision{true, 1}; }

    bool operator==(const WindowDecision&) const = default;
};

WindowDecision window_static(int gamma_fixed);

struct DynamicWindowState {
    int gamma = 4;
};

// Threshold heuristic: acceptance above 0.75 grows the window by one,
// below 0.25 shrinks it by one, clamped to [gamma_min, gamma_max].
WindowDecision window_dynamic(double acceptance_recent, DynamicWindowState& state, int gamma_min,
                              int gamma_max);

}  // namespace specsim
