#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "specsim/sim/rng.hpp"

namespace specsim {

// Residual MLP predicting the speculation window as a continuous scalar:
// input projection I->H, two residual blocks (linear H->H, SiLU,
// linear H->H, skip add), output head H->1. Parameters live in one flat
// vector so the optimizer and serializer can treat them uniformly.
class WcDnn {
public:
    struct Dims {
        int input = 5;
        int hidden = 64;
        int blocks = 2;
        bool operator==(const Dims&) const = default;
    };

    explicit WcDnn(Dims dims);

    static WcDnn random_init(Dims dims, RngStream& rng);

    const Dims& dims() const { return dims_; }
    std::size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    double forward(const double* x) const;

    // L1 loss against `label`; accumulates d|pred-label|/dtheta into `grad`
    // (same layout as params()) and returns the prediction.
    double forward_backward(const double* x, double label, std::vector<double>& grad) const;

private:
    struct Layout {
        std::size_t w_in, b_in;
        struct Block {
            std::size_t w1, b1, w2, b2;
        };
        std::vector<Block> blocks;
        std::size_t w_out, b_out;
        std::size_t total;
    };
    static Layout make_layout(Dims d);

    Dims dims_;
    Layout layout_;
    std::vector<double> params_;

    // per-call scratch (single-threaded use)
    mutable std::vector<double> h_, u_, s_, gh_, gu_, gs_;
    mutable std::vector<std::vector<double>> block_in_, block_u_, block_s_;
};

// Min-max feature normalization fitted on the training split only; the
// heavy-tailed rtt/tpot dimensions are log1p-scaled first.
struct FeatureNormalizer {
    std::array<double, 5> lo{};
    std::array<double, 5> hi{};
    std::array<bool, 5> log_scale{false, false, true, true, false};

    void fit(const std::vector<std::array<double, 5>>& rows);
    std::array<double, 5> transform(const std::array<double, 5>& raw) const;
};

struct TrainHyper {
    double lr = 1e-3;
    double weight_decay = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 100;
    int batch_size = 256;
    int hidden = 64;
    int blocks = 2;
};

// Trained controller: network plus the normalization statistics it was
// fitted with. The file round-trips bit-exactly (%.17g weights + checksum).
struct AwcModel {
    WcDnn net{WcDnn::Dims{}};
    FeatureNormalizer norm;
    TrainHyper hyper;
    std::uint64_t train_seed = 0;

    double predict_gamma(const std::array<double, 5>& raw_features) const;

    std::string serialize() const;
    void save(const std::string& path) const;
    static AwcModel parse(const std::string& text);  // throws CorruptModelFile
    static AwcModel load(const std::string& path);
};

}  // namespace specsim
