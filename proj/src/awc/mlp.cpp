#include "specsim/awc/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specsim/awc/kernels.hpp"
#include "specsim/errors.hpp"
#include "specsim/util/fnv.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim {

namespace {
using kernels::active_backend;
}

WcDnn::Layout WcDnn::make_layout(Dims d) {
    Layout l;
    std::size_t off = 0;
    const std::size_t I = static_cast<std::size_t>(d.input);
    const std::size_t H = static_cast<std::size_t>(d.hidden);
    l.w_in = off;
    off += H * I;
    l.b_in = off;
    off += H;
    for (int b = 0; b < d.blocks; ++b) {
        Layout::Block blk;
        blk.w1 = off;
        off += H * H;
        blk.b1 = off;
        off += H;
        blk.w2 = off;
        off += H * H;
        blk.b2 = off;
        off += H;
        l.blocks.push_back(blk);
    }
    l.w_out = off;
    off += H;
    l.b_out = off;
    off += 1;
    l.total = off;
    return l;
}

WcDnn::WcDnn(Dims dims) : dims_(dims), layout_(make_layout(dims)) {
    if (dims.input < 1 || dims.hidden < 1 || dims.blocks < 0) {
        throw ValidationError("invalid network dimensions");
    }
    params_.assign(layout_.total, 0.0);
    const std::size_t H = static_cast<std::size_t>(dims.hidden);
    h_.resize(H);
    u_.resize(H);
    s_.resize(H);
    gh_.resize(H);
    gu_.resize(H);
    gs_.resize(H);
    block_in_.assign(static_cast<std::size_t>(dims.blocks), std::vector<double>(H));
    block_u_.assign(static_cast<std::size_t>(dims.blocks), std::vector<double>(H));
    block_s_.assign(static_cast<std::size_t>(dims.blocks), std::vector<double>(H));
}

WcDnn WcDnn::random_init(Dims dims, RngStream& rng) {
    WcDnn net(dims);
    auto init_matrix = [&](std::size_t off, int rows, int cols) {
        double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * cols; ++i) {
            net.params_[off + i] = rng.uniform(-bound, bound);
        }
    };
    init_matrix(net.layout_.w_in, dims.hidden, dims.input);
    for (const auto& blk : net.layout_.blocks) {
        init_matrix(blk.w1, dims.hidden, dims.hidden);
        init_matrix(blk.w2, dims.hidden, dims.hidden);
    }
    init_matrix(net.layout_.w_out, 1, dims.hidden);
    return net;
}

double WcDnn::forward(const double* x) const {
    const int H = dims_.hidden;
    const double* p = params_.data();
    active_backend().matvec(p + layout_.w_in, x, p + layout_.b_in, h_.data(), H, dims_.input);
    for (const auto& blk : layout_.blocks) {
        active_backend().matvec(p + blk.w1, h_.data(), p + blk.b1, u_.data(), H, H);
        kernels::silu(u_.data(), s_.data(), H);
        active_backend().matvec(p + blk.w2, s_.data(), p + blk.b2, u_.data(), H, H);
        for (int i = 0; i < H; ++i) h_[static_cast<std::size_t>(i)] += u_[static_cast<std::size_t>(i)];
    }
    double out = p[layout_.b_out];
    const double* w_out = p + layout_.w_out;
    for (int i = 0; i < H; ++i) out += w_out[i] * h_[static_cast<std::size_t>(i)];
    return out;
}

double WcDnn::forward_backward(const double* x, double label, std::vector<double>& grad) const {
    if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
    const int H = dims_.hidden;
    const double* p = params_.data();
    double* g = grad.data();

    // forward, keeping the block inputs and pre-activations
    active_backend().matvec(p + layout_.w_in, x, p + layout_.b_in, h_.data(), H, dims_.input);
    for (std::size_t b = 0; b < layout_.blocks.size(); ++b) {
        const auto& blk = layout_.blocks[b];
        block_in_[b] = h_;
        active_backend().matvec(p + blk.w1, h_.data(), p + blk.b1, block_u_[b].data(), H, H);
        kernels::silu(block_u_[b].data(), block_s_[b].data(), H);
        active_backend().matvec(p + blk.w2, block_s_[b].data(), p + blk.b2, u_.data(), H, H);
        for (int i = 0; i < H; ++i) h_[static_cast<std::size_t>(i)] += u_[static_cast<std::size_t>(i)];
    }
    double pred = p[layout_.b_out];
    const double* w_out = p + layout_.w_out;
    for (int i = 0; i < H; ++i) pred += w_out[i] * h_[static_cast<std::size_t>(i)];

    // L1 subgradient
    double dout = pred > label ? 1.0 : (pred < label ? -1.0 : 0.0);

    // head
    active_backend().axpy(dout, h_.data(), g + layout_.w_out, H);
    g[layout_.b_out] += dout;
    for (int i = 0; i < H; ++i) gh_[static_cast<std::size_t>(i)] = dout * w_out[i];

    // residual blocks, reversed
    for (std::size_t b = layout_.blocks.size(); b-- > 0;) {
        const auto& blk = layout_.blocks[b];
        // gh_ is the gradient at the block output; skip connection passes it
        // through, the w2*silu(w1*h) branch adds to it.
        active_backend().ger_acc(g + blk.w2, gh_.data(), block_s_[b].data(), H, H);
        active_backend().axpy(1.0, gh_.data(), g + blk.b2, H);
        active_backend().matvec_t(p + blk.w2, gh_.data(), gs_.data(), H, H);
        kernels::silu_backward(block_u_[b].data(), gs_.data(), gu_.data(), H);
        active_backend().ger_acc(g + blk.w1, gu_.data(), block_in_[b].data(), H, H);
        active_backend().axpy(1.0, gu_.data(), g + blk.b1, H);
        active_backend().matvec_t(p + blk.w1, gu_.data(), gs_.data(), H, H);
        for (int i = 0; i < H; ++i) gh_[static_cast<std::size_t>(i)] += gs_[static_cast<std::size_t>(i)];
    }

    // input projection
    active_backend().ger_acc(g + layout_.w_in, gh_.data(), x, H, dims_.input);
    active_backend().axpy(1.0, gh_.data(), g + layout_.b_in, H);
    return pred;
}

void FeatureNormalizer::fit(const std::vector<std::array<double, 5>>& rows) {
    if (rows.empty()) throw ValidationError("normalizer fit on empty data");
    for (int f = 0; f < 5; ++f) {
        lo[static_cast<std::size_t>(f)] = 1e300;
        hi[static_cast<std::size_t>(f)] = -1e300;
    }
    for (const auto& row : rows) {
        for (std::size_t f = 0; f < 5; ++f) {
            double v = log_scale[f] ? std::log1p(row[f]) : row[f];
            lo[f] = std::min(lo[f], v);
            hi[f] = std::max(hi[f], v);
        }
    }
}

std::array<double, 5> FeatureNormalizer::transform(const std::array<double, 5>& raw) const {
    std::array<double, 5> out{};
    for (std::size_t f = 0; f < 5; ++f) {
        double v = log_scale[f] ? std::log1p(raw[f]) : raw[f];
        double span = hi[f] - lo[f];
        out[f] = span > 0.0 ? (v - lo[f]) / span : 0.0;
    }
    return out;
}

double AwcModel::predict_gamma(const std::array<double, 5>& raw_features) const {
    std::array<double, 5> x = norm.transform(raw_features);
    return net.forward(x.data());
}

namespace {

std::string weights_digest(const std::vector<double>& params) {
    std::string blob;
    blob.reserve(params.size() * 20);
    for (double v : params) {
        blob += format_exact(v);
        blob += ';';
    }
    return to_hex(fnv1a64(blob));
}

}  // namespace

std::string AwcModel::serialize() const {
    JsonWriter w;
    w.begin_object();
    w.key("format").value("wc-dnn/1");
    w.key("dims").begin_object();
    w.key("input").value(net.dims().input);
    w.key("hidden").value(net.dims().hidden);
    w.key("blocks").value(net.dims().blocks);
    w.end_object();
    w.key("normalizer").begin_object();
    w.key("lo").begin_array();
    for (double v : norm.lo) w.value_exact(v);
    w.end_array();
    w.key("hi").begin_array();
    for (double v : norm.hi) w.value_exact(v);
    w.end_array();
    w.key("log_scale").begin_array();
    for (bool v : norm.log_scale) w.value(v);
    w.end_array();
    w.end_object();
    w.key("hyperparams").begin_object();
    w.key("lr").value_exact(hyper.lr);
    w.key("weight_decay").value_exact(hyper.weight_decay);
    w.key("beta1").value_exact(hyper.beta1);
    w.key("beta2").value_exact(hyper.beta2);
    w.key("eps").value_exact(hyper.eps);
    w.key("epochs").value(hyper.epochs);
    w.key("batch_size").value(hyper.batch_size);
    w.key("seed").value(train_seed);
    w.end_object();
    w.key("weights").begin_array();
    for (double v : net.params()) w.value_exact(v);
    w.end_array();
    w.key("checksum").value(weights_digest(net.params()));
    w.end_object();
    std::string out = w.take();
    out += '\n';
    return out;
}

void AwcModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path);
    out << serialize();
}

AwcModel AwcModel::parse(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw CorruptModelFile("model file is not valid JSON");
    }
    try {
        if (j.at("format").get<std::string>() != "wc-dnn/1") {
            throw CorruptModelFile("unsupported model format");
        }
        AwcModel m;
        WcDnn::Dims dims;
        dims.input = j.at("dims").at("input").get<int>();
        dims.hidden = j.at("dims").at("hidden").get<int>();
        dims.blocks = j.at("dims").at("blocks").get<int>();
        m.net = WcDnn(dims);
        auto lo = j.at("normalizer").at("lo").get<std::vector<double>>();
        auto hi = j.at("normalizer").at("hi").get<std::vector<double>>();
        auto ls = j.at("normalizer").at("log_scale").get<std::vector<bool>>();
        if (lo.size() != 5 || hi.size() != 5 || ls.size() != 5) {
            throw CorruptModelFile("normalizer must have five entries");
        }
        for (std::size_t f = 0; f < 5; ++f) {
            m.norm.lo[f] = lo[f];
            m.norm.hi[f] = hi[f];
            m.norm.log_scale[f] = ls[f];
        }
        const auto& hp = j.at("hyperparams");
        m.hyper.lr = hp.at("lr").get<double>();
        m.hyper.weight_decay = hp.at("weight_decay").get<double>();
        m.hyper.beta1 = hp.at("beta1").get<double>();
        m.hyper.beta2 = hp.at("beta2").get<double>();
        m.hyper.eps = hp.at("eps").get<double>();
        m.hyper.epochs = hp.at("epochs").get<int>();
        m.hyper.batch_size = hp.at("batch_size").get<int>();
        m.hyper.hidden = dims.hidden;
        m.hyper.blocks = dims.blocks;
        m.train_seed = hp.at("seed").get<std::uint64_t>();
        auto weights = j.at("weights").get<std::vector<double>>();
        if (weights.size() != m.net.param_count()) {
            throw CorruptModelFile("weight count does not match dims");
        }
        m.net.params() = std::move(weights);
        if (j.at("checksum").get<std::string>() != weights_digest(m.net.params())) {
            throw CorruptModelFile("model checksum mismatch");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptModelFile(std::string("model file structure: ") + e.what());
    }
}

AwcModel AwcModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

}  // namespace specsim
