#include "specsim/policies/policies.hpp"

#include <cmath>

#include "specsim/errors.hpp"

namespace specsim {

int route_random(int n_targets, RngStream& rng) {
    if (n_targets < 1) throw ValidationError("routing requires at least one target");
    return static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n_targets)));
}

int route_round_robin(RoundRobinState& state, int n_targets) {
    if (n_targets < 1) throw ValidationError("routing requires at least one target");
    return static_cast<int>(state.counter++ % static_cast<std::uint64_t>(n_targets));
}

int route_jsq(const std::vector<int>& queue_depths) {
    if (queue_depths.empty()) throw ValidationError("routing requires at least one target");
    int best = 0;
    for (int i = 1; i < static_cast<int>(queue_depths.size()); ++i) {
        if (queue_depths[static_cast<std::size_t>(i)] < queue_depths[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> batch_fifo(const std::vector<BatchCandidate>& queue,
                                    int max_batch_size) {
    std::vector<std::size_t> out;
    for (const auto& c : queue) {
        if (static_cast<int>(out.size()) >= max_batch_size) break;
        out.push_back(c.queue_index);
    }
    return out;
}

std::vector<std::size_t> batch_lab(const std::vector<BatchCandidate>& queue, int max_batch_size,
                                   double similarity_fraction) {
    std::vector<std::size_t> out;
    if (queue.empty()) return out;
    const std::int64_t head_len = queue.front().work_length;
    const double band = similarity_fraction * static_cast<double>(head_len);
    out.push_back(queue.front().queue_index);
    for (std::size_t i = 1; i < queue.size(); ++i) {
        if (static_cast<int>(out.size()) >= max_batch_size) break;
        double diff = std::abs(static_cast<double>(queue[i].work_length - head_len));
        if (diff <= band) out.push_back(queue[i].queue_index);
    }
    return out;
}

WindowDecision window_static(int gamma_fixed) {
    if (gamma_fixed < 1) throw ValidationError("static window gamma must be >= 1");
    return WindowDecision::distributed(gamma_fixed);
}

WindowDecision window_dynamic(double acceptance_recent, DynamicWindowState& state, int gamma_min,
                              int gamma_max) {
    if (acceptance_recent > 0.75 && state.gamma < gamma_max) {
        ++state.gamma;
    } else if (acceptance_recent < 0.25 && state.gamma > gamma_min) {
        --state.gamma;
    }
    return WindowDecision::distributed(state.gamma);
}

}  // namespace specsim
