#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace specsim {

// Deterministic random stream (xoshiro256**), seeded from a 64-bit run seed
// plus a purpose label. One named stream per stochastic source, so adding
// a source never perturbs the draws of another. Identical (seed, stream_id)
// produce identical sequences on every platform.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id);

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit();

    // Uniform integer in [0, n), modulo-rejection so there is no bias.
    std::uint64_t uniform_below(std::uint64_t n);

    double uniform(double lo, double hi);
    bool bernoulli(double p);

    // Mean `mean` exponential variate (inter-arrival gaps).
    double exponential(double mean);

    // Box-Muller, single-branch so the stream advances by exactly two draws.
    double normal(double mean, double stddev);
    double lognormal(double mu, double sigma);

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace specsim
