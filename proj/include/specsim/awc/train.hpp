#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "specsim/awc/kernels.hpp"
#include "specsim/awc/mlp.hpp"

namespace specsim {

// One row of the sweep dataset: features observed while running a candidate
// window in a scenario, the candidate's achieved objective, and the
// scenario's argmin label. Fused is encoded as gamma 1 (the gamma <= 1 rule).
struct SweepSample {
    std::uint64_t scenario_id = 0;
    std::string split;  // "train" / "val" / "test", assigned per scenario
    std::array<double, 5> features{};
    int candidate_gamma = 2;
    bool candidate_fused = false;
    double objective = 0.0;
    int label_gamma = 2;
};

std::string serialize_dataset(const std::vector<SweepSample>& samples);
std::vector<SweepSample> parse_dataset(const std::string& text);
void save_dataset(const std::vector<SweepSample>& samples, const std::string& path);
std::vector<SweepSample> load_dataset(const std::string& path);

// Decoupled-weight-decay Adam over a flat parameter vector.
class AdamW {
public:
    AdamW(std::size_t n_params, kernels::AdamWParams p);
    void step(std::vector<double>& params, const std::vector<double>& grad);

private:
    kernels::AdamWParams p_;
    std::vector<double> m_, v_;
    std::int64_t t_ = 0;
};

struct TrainResult {
    AwcModel model;
    double train_mae = 0.0;
    double val_mae = 0.0;
    double test_mae = 0.0;
    std::vector<double> epoch_train_loss;  // mean L1 per epoch
};

// L1 regression of label_gamma from normalized features. Normalization
// statistics come from the training split only; shuffling uses the
// "training-shuffle" stream of `seed`.
TrainResult train_wc_dnn(const std::vector<SweepSample>& dataset, const TrainHyper& hyper,
                         std::uint64_t seed);

}  // namespace specsim
