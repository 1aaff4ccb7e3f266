#include "specsim/awc/smoother.hpp"

#include <algorithm>
#include <cmath>

namespace specsim {

WindowDecision stabilized_decide(double raw_prediction, SmootherState& state,
                                 const SmootherConfig& cfg) {
    double clamped = std::clamp(raw_prediction, cfg.gamma_min, cfg.gamma_max);

    if (!state.initialized) {
        state.ema = clamped;
        state.initialized = true;
    } else {
        state.ema = cfg.ema_alpha * clamped + (1.0 - cfg.ema_alpha) * state.ema;
    }

    if (!state.fused) {
        if (state.ema <= cfg.near_one_band) {
            ++state.low_streak;
        } else {
            state.low_streak = 0;
        }
        if (state.low_streak >= cfg.k_consecutive) state.fused = true;
    } else if (state.ema > cfg.near_one_band) {
        // leaving the near-1 band switches back to distributed immediately
        state.fused = false;
        state.low_streak = 0;
    }

    int gamma = static_cast<int>(std::floor(state.ema + 0.5));  // round half up
    gamma = std::clamp(gamma, static_cast<int>(cfg.gamma_min), static_cast<int>(cfg.gamma_max));

    if (state.fused && gamma <= 1) return WindowDecision::fused_mode();
    return WindowDecision::distributed(std::max(gamma, 1));
}

}  // namespace specsim
