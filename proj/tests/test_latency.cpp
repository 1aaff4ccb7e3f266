#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "specsim/errors.hpp"
#include "specsim/latency/profile.hpp"
#include "specsim/latency/specdec.hpp"
#include "specsim/sim/rng.hpp"

using namespace specsim;

namespace {

LatencyProfile::Grid small_grid() {
    LatencyProfile::Grid g;
    g.batch_axis = {1, 2, 4};
    g.context_axis = {0, 100};
    g.values_ms = {
        5,  8,   // batch 1
        10, 20,  // batch 2
        30, 60,  // batch 4
    };
    return g;
}

LatencyProfile small_profile() {
    LatencyProfile p;
    p.add_grid("m", "h", OpKind::Decode, small_grid());
    p.add_grid("m", "h", OpKind::Prefill, small_grid());
    return p;
}

// independent brute-force bilinear evaluation over the same grid
double bilinear_oracle(const LatencyProfile::Grid& g, double b, double c) {
    b = std::clamp(b, g.batch_axis.front(), g.batch_axis.back());
    c = std::clamp(c, g.context_axis.front(), g.context_axis.back());
    std::size_t bi = 0, ci = 0;
    while (bi + 2 < g.batch_axis.size() && b > g.batch_axis[bi + 1]) ++bi;
    while (ci + 2 < g.context_axis.size() && c > g.context_axis[ci + 1]) ++ci;
    double tb = (b - g.batch_axis[bi]) / (g.batch_axis[bi + 1] - g.batch_axis[bi]);
    double tc = (c - g.context_axis[ci]) / (g.context_axis[ci + 1] - g.context_axis[ci]);
    auto at = [&](std::size_t i, std::size_t j) {
        return g.values_ms[i * g.context_axis.size() + j];
    };
    return (1 - tb) * (1 - tc) * at(bi, ci) + (1 - tb) * tc * at(bi, ci + 1) +
           tb * (1 - tc) * at(bi + 1, ci) + tb * tc * at(bi + 1, ci + 1);
}

// Bernoulli speculation round: accept until first reject or gamma, plus the
// correction/bonus token.
double mc_expected_tau(double alpha, int gamma, int rounds, RngStream& rng) {
    std::int64_t committed = 0;
    for (int r = 0; r < rounds; ++r) {
        int accepted = 0;
        while (accepted < gamma && rng.bernoulli(alpha)) ++accepted;
        committed += accepted + 1;
    }
    return static_cast<double>(committed) / static_cast<double>(rounds);
}

}  // namespace

TEST_CASE("exact grid points return table values verbatim") {
    LatencyProfile p = small_profile();
    CHECK(p.interpolate(OpKind::Decode, "m", "h", 1, 0).latency_ms == 5);
    CHECK(p.interpolate(OpKind::Decode, "m", "h", 2, 100).latency_ms == 20);
    CHECK(p.interpolate(OpKind::Decode, "m", "h", 4, 0).latency_ms == 30);
    CHECK_FALSE(p.interpolate(OpKind::Decode, "m", "h", 4, 0).extrapolated);
}

TEST_CASE("midway between batch sizes with equal context is the arithmetic mean") {
    LatencyProfile p = small_profile();
    CHECK(p.interpolate(OpKind::Decode, "m", "h", 1.5, 0).latency_ms ==
          doctest::Approx((5.0 + 10.0) / 2));
    CHECK(p.interpolate(OpKind::Decode, "m", "h", 3, 100).latency_ms ==
          doctest::Approx((20.0 + 60.0) / 2));
}

TEST_CASE("interior bilinear query matches the hand-computed cell weights") {
    LatencyProfile p = small_profile();
    // cell b in [2,4] (tb=0.5), c in [0,100] (tc=0.25):
    // 0.5*0.75*10 + 0.5*0.25*20 + 0.5*0.75*30 + 0.5*0.25*60 = 25.0
    CHECK(p.interpolate(OpKind::Decode, "m", "h", 3, 25).latency_ms == doctest::Approx(25.0));
}

TEST_CASE("random interior queries match an independent bilinear oracle") {
    LatencyProfile p = small_profile();
    LatencyProfile::Grid g = small_grid();
    RngStream rng(17, "bilinear");
    for (int i = 0; i < 200; ++i) {
        double b = rng.uniform(1.0, 4.0);
        double c = rng.uniform(0.0, 100.0);
        CHECK(p.interpolate(OpKind::Decode, "m", "h", b, c).latency_ms ==
              doctest::Approx(bilinear_oracle(g, b, c)).epsilon(1e-12));
    }
}

TEST_CASE("outside the grid clamps to the edge and flags extrapolation") {
    LatencyProfile p = small_profile();
    auto r = p.interpolate(OpKind::Decode, "m", "h", 10, 0);
    CHECK(r.latency_ms == 30);
    CHECK(r.extrapolated);
    auto r2 = p.interpolate(OpKind::Decode, "m", "h", 1, 500);
    CHECK(r2.latency_ms == 8);
    CHECK(r2.extrapolated);
}

TEST_CASE("interpolation is continuous across grid cells") {
    LatencyProfile p = small_profile();
    const double eps = 1e-7;
    for (double b : {2.0}) {
        double at = p.interpolate(OpKind::Decode, "m", "h", b, 50).latency_ms;
        double below = p.interpolate(OpKind::Decode, "m", "h", b - eps, 50).latency_ms;
        double above = p.interpolate(OpKind::Decode, "m", "h", b + eps, 50).latency_ms;
        CHECK(std::fabs(at - below) < 1e-4);
        CHECK(std::fabs(at - above) < 1e-4);
    }
}

TEST_CASE("unknown profile keys throw") {
    LatencyProfile p = small_profile();
    CHECK_THROWS_AS(p.predict(OpKind::Decode, BatchShape{1, 1, 0}, "nope", "h"),
                    UnknownProfileKey);
}

TEST_CASE("predict semantics: decode multiplies steps, verify widens the batch") {
    LatencyProfile p = test_helpers::flat_profile(1.0, 20.0);
    // flat profile: no batch/context scaling
    CHECK(p.predict(OpKind::Decode, BatchShape{1, 4, 10}, kDraftModel, kEdgeHardware).latency_ms ==
          doctest::Approx(4.0));
    CHECK(p.predict(OpKind::Verify, BatchShape{2, 4, 10}, kTargetModel, kCloudHardware).latency_ms ==
          doctest::Approx(20.0));
    // prefill is priced on the prompt length axis
    CHECK(p.predict(OpKind::Prefill, BatchShape{1, 99, 0}, kTargetModel, kCloudHardware).latency_ms ==
          doctest::Approx(0.01 * 100.0));
}

TEST_CASE("synthetic profile: zero batch coefficient keeps latency constant in batch") {
    SynthProfileSpec spec = default_synth_spec(10.0, 0.1, 0.0, 0.0);
    LatencyProfile p = synth_profile(spec);
    double v1 = p.interpolate(OpKind::Decode, kTargetModel, kCloudHardware, 1, 0).latency_ms;
    double v64 = p.interpolate(OpKind::Decode, kTargetModel, kCloudHardware, 64, 0).latency_ms;
    CHECK(v1 == doctest::Approx(v64));
}

TEST_CASE("synthetic profile: draft/target decode ratio equals the cost ratio everywhere") {
    SynthProfileSpec spec = default_synth_spec(20.0, 0.1, 0.05, 0.3);
    LatencyProfile p = synth_profile(spec);
    for (double b : {1.0, 4.0, 32.0}) {
        for (double c : {0.0, 512.0, 4096.0}) {
            double target = p.interpolate(OpKind::Decode, kTargetModel, kCloudHardware, b, c).latency_ms;
            double draft = p.interpolate(OpKind::Decode, kDraftModel, kEdgeHardware, b, c).latency_ms;
            CHECK(draft / target == doctest::Approx(0.1).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile save/load round-trips bit-exactly") {
    test_helpers::TempDir tmp;
    LatencyProfile p = synth_profile(default_synth_spec(17.3, 0.07, 0.041, 0.29));
    p.save(tmp.file("p.json"));
    LatencyProfile q = LatencyProfile::load(tmp.file("p.json"));
    CHECK(q == p);
    q.save(tmp.file("p2.json"));
    CHECK(test_helpers::slurp(tmp.file("p.json")) == test_helpers::slurp(tmp.file("p2.json")));
}

TEST_CASE("profile validation: axes must increase, latencies must be positive") {
    LatencyProfile p;
    LatencyProfile::Grid g = small_grid();
    g.batch_axis = {1, 1, 4};
    CHECK_THROWS_AS(p.add_grid("m", "h", OpKind::Decode, g), ValidationError);
    g = small_grid();
    g.values_ms[0] = 0.0;
    CHECK_THROWS_AS(p.add_grid("m", "h", OpKind::Decode, g), ValidationError);
}

TEST_CASE("expected_tau trivial values") {
    CHECK(expected_tau(0.0, 4) == doctest::Approx(1.0));
    CHECK(expected_tau(1.0, 4) == doctest::Approx(5.0));
    CHECK(expected_tau(0.8, 4) == doctest::Approx(3.3616));
    CHECK(expected_tau(0.5, 0) == doctest::Approx(1.0));
}

TEST_CASE("expected_tau is monotone in alpha and gamma") {
    for (int g = 0; g <= 12; ++g) {
        double prev = -1.0;
        for (int a10 = 0; a10 <= 10; ++a10) {
            double v = expected_tau(a10 / 10.0, g);
            CHECK(v >= prev);
            prev = v;
        }
    }
    for (int a10 = 0; a10 <= 10; ++a10) {
        double prev = -1.0;
        for (int g = 0; g <= 12; ++g) {
            double v = expected_tau(a10 / 10.0, g);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("expected_tau matches the Monte Carlo oracle") {
    RngStream rng(4242, "mc-tau");
    for (double alpha : {0.2, 0.5, 0.8}) {
        for (int gamma : {1, 4, 12}) {
            double mc = mc_expected_tau(alpha, gamma, 200000, rng);
            double analytic = expected_tau(alpha, gamma);
            CHECK(std::fabs(mc - analytic) / analytic < 0.01);
        }
    }
}

TEST_CASE("expected_speedup examples") {
    CHECK(expected_speedup(0.3, 0, 0.1) == 1.0);  // gamma=0 is exactly 1
    CHECK(expected_speedup(0.9, 0, 2.0) == 1.0);
    CHECK(expected_speedup(0.0, 4, 0.1) == doctest::Approx(1.0 / 1.4));
    CHECK(expected_speedup(0.8, 4, 0.1) == doctest::Approx(3.3616 / 1.4));
    CHECK(expected_speedup(0.8, 4, 0.1) == doctest::Approx(2.4011).epsilon(1e-4));
}

TEST_CASE("expected_speedup is consistent with expected_tau") {
    RngStream rng(7, "speedup");
    for (int i = 0; i < 1000; ++i) {
        double alpha = rng.uniform(0.0, 1.0);
        int gamma = static_cast<int>(rng.uniform_below(13));
        double c = rng.uniform(0.01, 1.0);
        double lhs = expected_speedup(alpha, gamma, c);
        double rhs = expected_tau(alpha, gamma) / (c * gamma + 1.0);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(expected_tau(-0.1, 4), ValidationError);
    CHECK_THROWS_AS(expected_tau(0.5, -1), ValidationError);
    CHECK_THROWS_AS(expected_speedup(0.5, 4, 0.0), ValidationError);
}
