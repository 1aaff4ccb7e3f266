#include "specsim/awc/features.hpp"

namespace specsim {

FeatureVector extract_features(const MetricsCollector& metrics, int draft_id, int target_id) {
    FeatureVector f;
    f.q_depth = metrics.queue_utilization(target_id);
    f.alpha_recent = metrics.acceptance_recent(draft_id, target_id);
    f.rtt_recent_ms = metrics.rtt_recent_ms(draft_id, target_id);
    f.tpot_recent_ms = metrics.tpot_recent_ms(target_id);
    f.gamma_prev = static_cast<double>(metrics.gamma_prev(draft_id, target_id));
    return f;
}

}  // namespace specsim
