#include "specsim/latency/specdec.hpp"

#include <cmath>

#include "specsim/errors.hpp"

namespace specsim {

double expected_tau(double alpha, int gamma) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    if (gamma < 0) throw ValidationError("gamma must be >= 0");
    if (alpha == 1.0) return static_cast<double>(gamma) + 1.0;
    return (1.0 - std::pow(alpha, gamma + 1)) / (1.0 - alpha);
}

double expected_speedup(double alpha, int gamma, double cost_ratio) {
    if (!(cost_ratio > 0.0)) throw ValidationError("cost ratio must be positive");
    return expected_tau(alpha, gamma) / (cost_ratio * gamma + 1.0);
}

}  // namespace specsim
