#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "specsim/config/topology.hpp"
#include "specsim/latency/profile.hpp"
#include "specsim/util/yaml.hpp"

namespace test_helpers {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("specsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string dir() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Profile with constant decode latencies (no batch or context scaling), so
// engine timings can be checked by hand: draft decode = draft_ms per token,
// target decode/verify step = target_ms, prefill = prefill_per_token*(L+1).
inline specsim::LatencyProfile flat_profile(double draft_ms, double target_ms,
                                            double prefill_per_token = 0.01) {
    specsim::SynthProfileSpec spec;
    specsim::SynthProfileSpec::Entry target;
    target.model = specsim::kTargetModel;
    target.hardware = specsim::kCloudHardware;
    target.decode_base_ms = target_ms;
    target.prefill_ms_per_token = prefill_per_token;
    target.batch_coef = 0.0;
    target.context_coef = 0.0;
    specsim::SynthProfileSpec::Entry draft = target;
    draft.model = specsim::kDraftModel;
    draft.hardware = specsim::kEdgeHardware;
    draft.decode_base_ms = draft_ms;
    spec.entries = {target, draft};
    return specsim::synth_profile(spec);
}

inline specsim::Topology topo_from_yaml(const std::string& text) {
    return specsim::auto_topology(specsim::yaml::parse_string(text));
}

}  // namespace test_helpers
