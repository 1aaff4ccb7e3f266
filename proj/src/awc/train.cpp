#include "specsim/awc/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "specsim/errors.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim {

std::string serialize_dataset(const std::vector<SweepSample>& samples) {
    std::string out;
    for (const auto& s : samples) {
        out += "{\"scenario_id\":" + std::to_string(s.scenario_id);
        out += ",\"split\":\"" + s.split + "\"";
        out += ",\"features\":[";
        for (std::size_t f = 0; f < 5; ++f) {
            if (f) out += ',';
            out += format_exact(s.features[f]);
        }
        out += "],\"candidate_gamma\":" + std::to_string(s.candidate_gamma);
        out += ",\"candidate_mode\":\"" + std::string(s.candidate_fused ? "fused" : "distributed") + "\"";
        out += ",\"objective\":" + format_exact(s.objective);
        out += ",\"label_gamma\":" + std::to_string(s.label_gamma);
        out += "}\n";
    }
    return out;
}

std::vector<SweepSample> parse_dataset(const std::string& text) {
    std::vector<SweepSample> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": invalid JSON");
        }
        try {
            SweepSample s;
            s.scenario_id = j.at("scenario_id").get<std::uint64_t>();
            s.split = j.at("split").get<std::string>();
            auto f = j.at("features").get<std::vector<double>>();
            if (f.size() != 5) {
                throw ParseError("dataset line " + std::to_string(line_no) +
                                 ": features must have five entries");
            }
            std::copy(f.begin(), f.end(), s.features.begin());
            s.candidate_gamma = j.at("candidate_gamma").get<int>();
            s.candidate_fused = j.at("candidate_mode").get<std::string>() == "fused";
            s.objective = j.at("objective").get<double>();
            s.label_gamma = j.at("label_gamma").get<int>();
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void save_dataset(const std::vector<SweepSample>& samples, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset file: " + path);
    out << serialize_dataset(samples);
}

std::vector<SweepSample> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

AdamW::AdamW(std::size_t n_params, kernels::AdamWParams p)
    : p_(p), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamW::step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    double bias1 = 1.0 - std::pow(p_.beta1, static_cast<double>(t_));
    double bias2 = 1.0 - std::pow(p_.beta2, static_cast<double>(t_));
    kernels::active_backend().adamw_update(params.data(), m_.data(), v_.data(), grad.data(),
                                           static_cast<int>(params.size()), p_, bias1, bias2);
}

TrainResult train_wc_dnn(const std::vector<SweepSample>& dataset, const TrainHyper& hyper,
                         std::uint64_t seed) {
    std::vector<const SweepSample*> train, val, test;
    for (const auto& s : dataset) {
        if (s.split == "train") {
            train.push_back(&s);
        } else if (s.split == "val") {
            val.push_back(&s);
        } else {
            test.push_back(&s);
        }
    }
    if (train.empty()) throw ValidationError("training split is empty");

    TrainResult result;
    result.model.hyper = hyper;
    result.model.train_seed = seed;

    std::vector<std::array<double, 5>> train_rows;
    train_rows.reserve(train.size());
    for (const auto* s : train) train_rows.push_back(s->features);
    result.model.norm.fit(train_rows);
    const FeatureNormalizer& norm = result.model.norm;

    RngStream init_rng(seed, "training-init");
    WcDnn::Dims dims{5, hyper.hidden, hyper.blocks};
    result.model.net = WcDnn::random_init(dims, init_rng);
    WcDnn& net = result.model.net;
    // start the head at the mean label so training fits deviations only
    double label_mean = 0.0;
    for (const auto* s : train) label_mean += static_cast<double>(s->label_gamma);
    label_mean /= static_cast<double>(train.size());
    net.params().back() = label_mean;

    kernels::AdamWParams opt_params{hyper.lr, hyper.beta1, hyper.beta2, hyper.eps,
                                    hyper.weight_decay};
    AdamW opt(net.param_count(), opt_params);

    RngStream shuffle_rng(seed, "training-shuffle");
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(net.param_count(), 0.0);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        // Fisher-Yates with the shuffle stream
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = shuffle_rng.uniform_below(i);
            std::swap(order[i - 1], order[j]);
        }
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            std::size_t end = std::min(pos + static_cast<std::size_t>(hyper.batch_size),
                                       order.size());
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = pos; i < end; ++i) {
                const SweepSample& s = *train[order[i]];
                std::array<double, 5> x = norm.transform(s.features);
                double pred = net.forward_backward(x.data(), static_cast<double>(s.label_gamma),
                                                   grad);
                epoch_loss += std::fabs(pred - static_cast<double>(s.label_gamma));
            }
            double inv = 1.0 / static_cast<double>(end - pos);
            for (auto& g : grad) g *= inv;
            opt.step(net.params(), grad);
            pos = end;
        }
        result.epoch_train_loss.push_back(epoch_loss / static_cast<double>(train.size()));
    }

    auto mae = [&](const std::vector<const SweepSample*>& split) {
        if (split.empty()) return 0.0;
        double total = 0.0;
        for (const auto* s : split) {
            std::array<double, 5> x = norm.transform(s->features);
            total += std::fabs(net.forward(x.data()) - static_cast<double>(s->label_gamma));
        }
        return total / static_cast<double>(split.size());
    };
    result.train_mae = mae(train);
    result.val_mae = mae(val);
    result.test_mae = mae(test);
    return result;
}

}  // namespace specsim
