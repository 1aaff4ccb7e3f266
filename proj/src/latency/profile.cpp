#include "specsim/latency/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specsim/errors.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim {

namespace {

using nlohmann::json;

// Index of the cell containing q, clamped so [i, i+1] is a valid segment.
std::size_t segment_index(const std::vector<double>& axis, double q) {
    if (axis.size() == 1) return 0;
    auto it = std::upper_bound(axis.begin(), axis.end(), q);
    std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    if (hi == 0) return 0;
    if (hi >= axis.size()) return axis.size() - 2;
    return hi - 1;
}

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw ValidationError(std::string("profile grid: empty ") + name);
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1])) {
            throw ValidationError(std::string("profile grid: ") + name +
                                  " must be strictly increasing");
        }
    }
}

OpKind op_from_name(const std::string& s) {
    if (s == "prefill") return OpKind::Prefill;
    if (s == "decode") return OpKind::Decode;
    if (s == "verify") return OpKind::Verify;
    throw ParseError("profile: unknown op '" + s + "'");
}

}  // namespace

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Prefill: return "prefill";
        case OpKind::Decode: return "decode";
        case OpKind::Verify: return "verify";
    }
    return "?";
}

double LatencyProfile::Grid::interpolate(double batch, double context,
                                         bool* extrapolated) const {
    bool clamped = false;
    auto clamp_axis = [&](const std::vector<double>& axis, double q) {
        if (q < axis.front()) {
            clamped = true;
            return axis.front();
        }
        if (q > axis.back()) {
            clamped = true;
            return axis.back();
        }
        return q;
    };
    double b = clamp_axis(batch_axis, batch);
    double c = clamp_axis(context_axis, context);

    std::size_t bi = segment_index(batch_axis, b);
    std::size_t ci = segment_index(context_axis, c);
    std::size_t bj = std::min(bi + 1, batch_axis.size() - 1);
    std::size_t cj = std::min(ci + 1, context_axis.size() - 1);

    double tb = (bj == bi) ? 0.0 : (b - batch_axis[bi]) / (batch_axis[bj] - batch_axis[bi]);
    double tc = (cj == ci) ? 0.0 : (c - context_axis[ci]) / (context_axis[cj] - context_axis[ci]);

    const std::size_t n = context_axis.size();
    auto at = [&](std::size_t i, std::size_t j) { return values_ms[i * n + j]; };
    double v = (1.0 - tb) * (1.0 - tc) * at(bi, ci) + (1.0 - tb) * tc * at(bi, cj) +
               tb * (1.0 - tc) * at(bj, ci) + tb * tc * at(bj, cj);
    if (extrapolated) *extrapolated = clamped;
    return v * calibration;
}

void LatencyProfile::add_grid(const std::string& model, const std::string& hardware, OpKind op,
                              Grid g) {
    check_axis(g.batch_axis, "batch axis");
    check_axis(g.context_axis, "context axis");
    if (g.values_ms.size() != g.batch_axis.size() * g.context_axis.size()) {
        throw ValidationError("profile grid: values size does not match axes");
    }
    for (double v : g.values_ms) {
        if (!(v > 0.0)) throw ValidationError("profile grid: latencies must be positive");
    }
    entries_[Key{model, hardware, op}] = std::move(g);
}

bool LatencyProfile::has_grid(const std::string& model, const std::string& hardware,
                              OpKind op) const {
    if (op == OpKind::Verify) op = OpKind::Decode;
    return entries_.count(Key{model, hardware, op}) > 0;
}

const LatencyProfile::Grid& LatencyProfile::grid(const std::string& model,
                                                 const std::string& hardware, OpKind op) const {
    if (op == OpKind::Verify) op = OpKind::Decode;  // verify is decode-shaped
    auto it = entries_.find(Key{model, hardware, op});
    if (it == entries_.end()) {
        throw UnknownProfileKey("no profile entry for (" + model + ", " + hardware + ", " +
                                op_kind_name(op) + ")");
    }
    return it->second;
}

PredictResult LatencyProfile::interpolate(OpKind op, const std::string& model,
                                          const std::string& hardware, double batch,
                                          double context) const {
    const Grid& g = grid(model, hardware, op);
    PredictResult r;
    r.latency_ms = g.interpolate(batch, context, &r.extrapolated);
    return r;
}

PredictResult LatencyProfile::predict(OpKind op, const BatchShape& shape,
                                      const std::string& model,
                                      const std::string& hardware) const {
    if (shape.batch_size < 1 || shape.tokens_per_request < 1 || shape.context_length < 0) {
        throw ValidationError("predict: invalid batch shape");
    }
    switch (op) {
        case OpKind::Prefill:
            return interpolate(OpKind::Prefill, model, hardware, shape.batch_size,
                               static_cast<double>(shape.tokens_per_request));
        case OpKind::Decode: {
            PredictResult r = interpolate(OpKind::Decode, model, hardware, shape.batch_size,
                                          static_cast<double>(shape.context_length));
            r.latency_ms *= shape.tokens_per_request;
            return r;
        }
        case OpKind::Verify:
            return interpolate(OpKind::Decode, model, hardware,
                               static_cast<double>(shape.batch_size) * shape.tokens_per_request,
                               static_cast<double>(shape.context_length));
    }
    throw ValidationError("predict: bad op");
}

std::string LatencyProfile::serialize() const {
    JsonWriter w;
    w.begin_object();
    w.key("meta").begin_object();
    w.key("units").value("ms");
    w.key("axes").value("batch_size x context_length");
    w.key("note").value(note);
    w.end_object();
    w.key("entries").begin_array();
    for (const auto& [key, g] : entries_) {
        w.begin_object();
        w.key("model").value(key.model);
        w.key("hardware").value(key.hardware);
        w.key("op").value(op_kind_name(key.op));
        w.key("calibration").value_exact(g.calibration);
        w.key("batch_axis").begin_array();
        for (double v : g.batch_axis) w.value_exact(v);
        w.end_array();
        w.key("context_axis").begin_array();
        for (double v : g.context_axis) w.value_exact(v);
        w.end_array();
        w.key("values_ms").begin_array();
        for (double v : g.values_ms) w.value_exact(v);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    std::string out = w.take();
    out += '\n';
    return out;
}

void LatencyProfile::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write profile file: " + path);
    out << serialize();
}

LatencyProfile LatencyProfile::parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("entries")) {
        throw ParseError("profile: invalid JSON document");
    }
    LatencyProfile p;
    if (j.contains("meta") && j["meta"].contains("note")) {
        p.note = j["meta"]["note"].get<std::string>();
    }
    for (const auto& e : j["entries"]) {
        Grid g;
        g.calibration = e.value("calibration", 1.0);
        g.batch_axis = e.at("batch_axis").get<std::vector<double>>();
        g.context_axis = e.at("context_axis").get<std::vector<double>>();
        g.values_ms = e.at("values_ms").get<std::vector<double>>();
        p.add_grid(e.at("model").get<std::string>(), e.at("hardware").get<std::string>(),
                   op_from_name(e.at("op").get<std::string>()), std::move(g));
    }
    return p;
}

LatencyProfile LatencyProfile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

LatencyProfile synth_profile(const SynthProfileSpec& spec) {
    if (spec.entries.empty()) throw ValidationError("synth profile: no entries");
    LatencyProfile p;
    p.note = "synthetic desk-scale profile";
    for (const auto& e : spec.entries) {
        if (!(e.decode_base_ms > 0.0) || !(e.prefill_ms_per_token > 0.0)) {
            throw ValidationError("synth profile: base latencies must be positive");
        }
        if (e.batch_coef < 0.0 || e.context_coef < 0.0 || !(e.context_ref > 0.0)) {
            throw ValidationError("synth profile: coefficients must be non-negative");
        }
        LatencyProfile::Grid decode;
        decode.batch_axis = spec.batch_axis;
        decode.context_axis = spec.context_axis;
        decode.calibration = e.calibration;
        for (double b : spec.batch_axis) {
            for (double c : spec.context_axis) {
                double v = e.decode_base_ms * (1.0 + e.batch_coef * (b - 1.0)) *
                           (1.0 + e.context_coef * std::sqrt(c / e.context_ref));
                decode.values_ms.push_back(v);
            }
        }
        LatencyProfile::Grid prefill;
        prefill.batch_axis = spec.batch_axis;
        prefill.context_axis = spec.context_axis;
        prefill.calibration = e.calibration;
        for (double b : spec.batch_axis) {
            for (double c : spec.context_axis) {
                double v = e.prefill_ms_per_token * (c + 1.0) * (1.0 + e.batch_coef * (b - 1.0));
                prefill.values_ms.push_back(v);
            }
        }
        p.add_grid(e.model, e.hardware, OpKind::Decode, std::move(decode));
        p.add_grid(e.model, e.hardware, OpKind::Prefill, std::move(prefill));
    }
    return p;
}

SynthProfileSpec default_synth_spec(double target_decode_ms, double cost_ratio,
                                    double batch_coef, double context_coef,
                                    double prefill_ms_per_token) {
    if (!(cost_ratio > 0.0)) throw ValidationError("cost ratio must be positive");
    SynthProfileSpec spec;
    SynthProfileSpec::Entry target;
    target.model = kTargetModel;
    target.hardware = kCloudHardware;
    target.decode_base_ms = target_decode_ms;
    target.prefill_ms_per_token = prefill_ms_per_token;
    target.batch_coef = batch_coef;
    target.context_coef = context_coef;
    SynthProfileSpec::Entry draft = target;
    draft.model = kDraftModel;
    draft.hardware = kEdgeHardware;
    draft.decode_base_ms = target_decode_ms * cost_ratio;
    draft.prefill_ms_per_token = prefill_ms_per_token * cost_ratio;
    spec.entries = {target, draft};
    return spec;
}

}  // namespace specsim
