#include "specsim/workload/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specsim/errors.hpp"
#include "specsim/sim/rng.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim {

namespace {

using nlohmann::json;

std::int64_t require_int(const json& j, const char* key, int line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
        throw ParseError("trace line " + std::to_string(line) + ": missing integer field '" +
                         key + "'");
    }
    return it->get<std::int64_t>();
}

}  // namespace

void validate_record(const TraceRecord& r, std::size_t index) {
    auto bad = [&](const char* field, const std::string& why) {
        throw ValidationError("trace record " + std::to_string(index) + ": field '" + field +
                              "' " + why);
    };
    if (r.prompt_length < 1) bad("prompt_length", "must be >= 1");
    if (r.output_length < 0) bad("output_length", "must be >= 0");
    if (r.arrival_us < 0) bad("arrival_time_ms", "must be >= 0");
    if (r.drafter_id < 0) bad("drafter_id", "must be >= 0");
    if (r.output_length > 0 && r.acceptance_seq.empty())
        bad("acceptance_seq", "must be non-empty when output_length > 0");
    for (auto bit : r.acceptance_seq) {
        if (bit > 1) bad("acceptance_seq", "contains a value other than 0/1");
    }
}

void validate_drafter_ids(const std::vector<TraceRecord>& records, std::int64_t n_drafts) {
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].drafter_id >= n_drafts) {
            throw ValidationError("trace record " + std::to_string(i) + ": field 'drafter_id' " +
                                  std::to_string(records[i].drafter_id) +
                                  " out of range for draft pool of size " +
                                  std::to_string(n_drafts));
        }
    }
}

std::vector<TraceRecord> parse_trace(const std::string& text) {
    std::vector<TraceRecord> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError("trace line " + std::to_string(line_no) + ": invalid JSON record");
        }
        TraceRecord r;
        r.prompt_length = require_int(j, "prompt_length", line_no);
        r.output_length = require_int(j, "output_length", line_no);
        auto it = j.find("arrival_time_ms");
        if (it == j.end() || !it->is_number()) {
            throw ParseError("trace line " + std::to_string(line_no) +
                             ": missing numeric field 'arrival_time_ms'");
        }
        r.arrival_us = ms_to_us(it->get<double>());
        r.drafter_id = require_int(j, "drafter_id", line_no);
        auto seq = j.find("acceptance_seq");
        if (seq == j.end() || !seq->is_array()) {
            throw ParseError("trace line " + std::to_string(line_no) +
                             ": missing array field 'acceptance_seq'");
        }
        r.acceptance_seq.reserve(seq->size());
        for (const auto& bit : *seq) {
            if (!bit.is_number_integer()) {
                throw ParseError("trace line " + std::to_string(line_no) +
                                 ": acceptance_seq must contain integers");
            }
            r.acceptance_seq.push_back(static_cast<std::uint8_t>(bit.get<int>()));
        }
        validate_record(r, out.size());
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<TraceRecord> load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace(buf.str());
}

std::string serialize_trace(const std::vector<TraceRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += "{\"prompt_length\":" + std::to_string(r.prompt_length);
        out += ",\"output_length\":" + std::to_string(r.output_length);
        out += ",\"acceptance_seq\":[";
        for (std::size_t i = 0; i < r.acceptance_seq.size(); ++i) {
            if (i) out += ',';
            out += r.acceptance_seq[i] ? '1' : '0';
        }
        out += "],\"arrival_time_ms\":" + format_fixed(us_to_ms(r.arrival_us), 3);
        out += ",\"drafter_id\":" + std::to_string(r.drafter_id);
        out += "}\n";
    }
    return out;
}

void save_trace(const std::vector<TraceRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write trace file: " + path);
    out << serialize_trace(records);
}

LengthDist length_preset(const std::string& name) {
    LengthDist d;
    if (name == "gsm8k-like") {
        d = {60.0, 0.4, 90.0, 0.35, 4096, 2048};
    } else if (name == "cnndm-like") {
        d = {600.0, 0.5, 180.0, 0.4, 4096, 2048};
    } else if (name == "humaneval-like") {
        d = {130.0, 0.4, 160.0, 0.5, 4096, 2048};
    } else {
        throw ConfigError("unknown length preset '" + name +
                          "' (expected gsm8k-like, cnndm-like or humaneval-like)");
    }
    return d;
}

std::vector<TraceRecord> generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (!(spec.acceptance_rate >= 0.0 && spec.acceptance_rate <= 1.0)) {
        throw ValidationError("acceptance rate must lie in [0, 1]");
    }
    if (!(spec.rate_rps > 0.0) || !std::isfinite(spec.rate_rps)) {
        throw ValidationError("poisson rate must be finite and positive");
    }
    if (spec.n_requests < 0) throw ValidationError("n_requests must be >= 0");
    if (spec.n_drafts < 1) throw ValidationError("n_drafts must be >= 1");

    RngStream arrivals(seed, "arrivals");
    RngStream bits(seed, "accept-bits");
    RngStream lengths(seed, "lengths");
    RngStream drafter(seed, "drafter-assign");

    const double mean_gap_ms = 1000.0 / spec.rate_rps;
    const auto& L = spec.lengths;
    const double p_mu = std::log(L.prompt_median);
    const double o_mu = std::log(L.output_median);

    std::vector<TraceRecord> out;
    out.reserve(static_cast<std::size_t>(spec.n_requests));
    double clock_ms = 0.0;
    for (std::int64_t n = 0; n < spec.n_requests; ++n) {
        clock_ms += arrivals.exponential(mean_gap_ms);
        TraceRecord r;
        r.arrival_us = ms_to_us(clock_ms);
        r.prompt_length = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(lengths.lognormal(p_mu, L.prompt_sigma))), 1,
            L.prompt_cap);
        r.output_length = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(lengths.lognormal(o_mu, L.output_sigma))), 1,
            L.output_cap);
        r.drafter_id = static_cast<std::int64_t>(
            drafter.uniform_below(static_cast<std::uint64_t>(spec.n_drafts)));
        r.acceptance_seq.resize(static_cast<std::size_t>(r.output_length));
        for (auto& bit : r.acceptance_seq) {
            bit = bits.bernoulli(spec.acceptance_rate) ? 1 : 0;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace specsim
