#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace specsim {

enum class OpKind : std::uint8_t { Prefill, Decode, Verify };

const char* op_kind_name(OpKind k);

struct BatchShape {
    int batch_size = 1;
    int tokens_per_request = 1;   // prompt tokens (prefill), steps (decode), window (verify)
    std::int64_t context_length = 0;
};

struct PredictResult {
    double latency_ms = 0.0;
    bool extrapolated = false;  // query clamped to the grid edge
};

// Table-driven latency predictor. Each (model, hardware, op) maps to a dense
// grid over (batch_size, context_length); queries interpolate bilinearly and
// clamp to the edge outside the grid. For prefill the context axis carries
// the prompt length.
//
// Cost semantics of predict():
//   Prefill: one pass over the padded prompt, value at (batch, tokens).
//   Decode:  tokens_per_request sequential steps, each at (batch, context).
//   Verify:  one parallel step over batch*tokens token slots at
//            (batch*tokens, context) on the decode grid.
class LatencyProfile {
public:
    struct Grid {
        std::vector<double> batch_axis;    // strictly increasing
        std::vector<double> context_axis;  // strictly increasing
        std::vector<double> values_ms;     // row-major [batch][context], all > 0
        double calibration = 1.0;          // global multiplicative correction

        double interpolate(double batch, double context, bool* extrapolated) const;

        bool operator==(const Grid&) const = default;
    };

    void add_grid(const std::string& model, const std::string& hardware, OpKind op, Grid g);
    bool has_grid(const std::string& model, const std::string& hardware, OpKind op) const;
    const Grid& grid(const std::string& model, const std::string& hardware, OpKind op) const;

    PredictResult predict(OpKind op, const BatchShape& shape, const std::string& model,
                          const std::string& hardware) const;

    // Raw bilinear query at real-valued coordinates, mostly for tests.
    PredictResult interpolate(OpKind op, const std::string& model, const std::string& hardware,
                              double batch, double context) const;

    std::string note;

    std::string serialize() const;
    void save(const std::string& path) const;
    static LatencyProfile parse(const std::string& text);
    static LatencyProfile load(const std::string& path);

    bool operator==(const LatencyProfile& other) const { return entries_ == other.entries_; }

private:
    struct Key {
        std::string model, hardware;
        OpKind op;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, Grid> entries_;
};

// Synthetic desk-scale profile: decode latency affine in batch size and
// sub-linear in context length, draft per-token cost = cost_ratio * target.
struct SynthProfileSpec {
    struct Entry {
        std::string model;
        std::string hardware;
        double decode_base_ms = 20.0;       // single request, empty context
        double prefill_ms_per_token = 0.2;  // single request
        double batch_coef = 0.05;           // latency *= 1 + coef*(batch-1)
        double context_coef = 0.3;          // latency *= 1 + coef*sqrt(ctx/ctx_ref)
        double context_ref = 512.0;
        double calibration = 1.0;
    };
    std::vector<Entry> entries;
    std::vector<double> batch_axis = {1, 2, 4, 8, 16, 32, 64, 128, 256};
    std::vector<double> context_axis = {0, 64, 128, 256, 512, 1024, 2048, 4096};
};

LatencyProfile synth_profile(const SynthProfileSpec& spec);

// Convenience pair used throughout tests and the CLI: a target entry plus a
// draft entry whose per-token decode cost is cost_ratio times the target's.
SynthProfileSpec default_synth_spec(double target_decode_ms, double cost_ratio,
                                    double batch_coef, double context_coef,
                                    double prefill_ms_per_token = 0.2);

inline const char* kTargetModel = "target-model";
inline const char* kCloudHardware = "cloud-gpu";
inline const char* kDraftModel = "draft-model";
inline const char* kEdgeHardware = "edge-gpu";

}  // namespace specsim
