#include "specsim/sim/rng.hpp"

#include <cmath>

#include "specsim/util/fnv.hpp"

namespace specsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view stream_id) {
    std::uint64_t state = seed ^ fnv1a64(stream_id);
    for (auto& w : s_) w = splitmix64(state);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
}

bool RngStream::bernoulli(double p) {
    return next_unit() < p;
}

double RngStream::exponential(double mean) {
    // next_unit() < 1, so the log argument is strictly positive.
    return -mean * std::log(1.0 - next_unit());
}

double RngStream::normal(double mean, double stddev) {
    double u1 = 1.0 - next_unit();
    double u2 = next_unit();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
}

double RngStream::lognormal(double mu, double sigma) {
    return std::exp(normal(mu, sigma));
}

}  // namespace specsim
