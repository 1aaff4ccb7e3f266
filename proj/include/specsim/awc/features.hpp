#pragma once

#include <array>

#include "specsim/metrics/metrics.hpp"

namespace specsim {

// The five controller inputs, in this fixed order.
struct FeatureVector {
    double q_depth = 0.0;         // target queue utilization, [0, 1]
    double alpha_recent = 0.5;    // recent acceptance rate, [0, 1]
    double rtt_recent_ms = 0.0;
    double tpot_recent_ms = 0.0;
    double gamma_prev = 4.0;

    std::array<double, 5> as_array() const {
        return {q_depth, alpha_recent, rtt_recent_ms, tpot_recent_ms, gamma_prev};
    }
};

// Cold-start values fall out of the collector defaults: (0, 0.5, link rtt,
// 0, gamma_init). q_depth and tpot are target-level; alpha, rtt and
// gamma_prev are per draft-target pair.
FeatureVector extract_features(const MetricsCollector& metrics, int draft_id, int target_id);

}  // namespace specsim
