#pragma once

namespace specsim {

struct SpecDecParams {
    double alpha = 0.8;       // per-token acceptance probability, in [0, 1]
    int gamma = 4;            // speculation window size, >= 0
    double cost_ratio = 0.1;  // draft/target per-token cost, > 0
};

// Expected committed tokens per speculation round: the accepted prefix plus
// one target token (correction on reject, bonus on full acceptance).
// (1 - alpha^(gamma+1)) / (1 - alpha); gamma + 1 in the alpha -> 1 limit.
double expected_tau(double alpha, int gamma);

// Expected speedup over plain target decoding: expected_tau / (c*gamma + 1).
double expected_speedup(double alpha, int gamma, double cost_ratio);

inline double expected_tau(const SpecDecParams& p) { return expected_tau(p.alpha, p.gamma); }
inline double expected_speedup(const SpecDecParams& p) {
    return expected_speedup(p.alpha, p.gamma, p.cost_ratio);
}

}  // namespace specsim
