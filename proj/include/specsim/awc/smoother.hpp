#pragma once

#include "specsim/policies/policies.hpp"

namespace specsim {

// Stabilization pipeline applied to raw WC-DNN predictions:
// clamp -> EMA -> mode hysteresis -> round-half-up quantization.
struct SmootherConfig {
    double gamma_min = 1.0;
    double gamma_max = 12.0;
    double ema_alpha = 0.4;        // weight on the new clamped prediction
    double near_one_band = 1.5;    // smoothed values <= band count toward fused
    int k_consecutive = 2;         // steps in band before distributed->fused
};

struct SmootherState {
    bool initialized = false;  // ema seeds with the first clamped prediction
    double ema = 0.0;
    int low_streak = 0;
    bool fused = false;
};

WindowDecision stabilized_decide(double raw_prediction, SmootherState& state,
                                 const SmootherConfig& cfg = {});

}  // namespace specsim
