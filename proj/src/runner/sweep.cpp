#include "specsim/runner/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <thread>

#include "specsim/errors.hpp"
#include "specsim/metrics/metrics.hpp"
#include "specsim/util/fnv.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim {

SweepSpec SweepSpec::from_node(const yaml::Node& node, const std::string& base_dir) {
    SweepSpec spec;
    spec.base_dir = base_dir;
    if (const yaml::Node* base = node.find("base"); base && base->is_scalar()) {
        std::string path = base->as_string();
        if (!path.empty() && path.front() != '/' && !base_dir.empty() && base_dir != ".") {
            path = base_dir + "/" + path;
        }
        spec.base_config = yaml::parse_file(path);
    } else if (const yaml::Node* inline_cfg = node.find("config")) {
        spec.base_config = *inline_cfg;
    } else {
        throw ConfigError("sweep spec requires 'base' (path) or 'config' (inline)");
    }
    spec.base_seed = static_cast<std::uint64_t>(
        node.get_int("seed", static_cast<std::int64_t>(kDefaultSeed)));
    spec.repetitions = static_cast<int>(node.get_int("repetitions", 1));
    if (spec.repetitions < 1) throw ConfigError("sweep repetitions must be >= 1");
    if (const yaml::Node* axes = node.find("axes"); axes && axes->is_map()) {
        for (const auto& kv : axes->map) {
            if (!kv.second.is_seq() || kv.second.seq.empty()) {
                throw ConfigError("sweep axis '" + kv.first + "' must be a non-empty list");
            }
            spec.axes.emplace_back(kv.first, kv.second.seq);
        }
    }
    return spec;
}

std::size_t SweepSpec::point_count() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.second.size();
    return n;
}

std::uint64_t sweep_point_seed(std::uint64_t base_seed, const std::string& point_id,
                               int repetition) {
    // a sweep with no axes degenerates to a plain run of the base config
    if (point_id == "base" && repetition == 0) return base_seed;
    std::string key = point_id + "#rep=" + std::to_string(repetition);
    return fnv1a64(key, base_seed ^ 0x9e3779b97f4a7c15ULL);
}

namespace {

// canonical point id: axis assignments sorted by path
std::string make_point_id(const std::vector<std::pair<std::string, std::string>>& assignment) {
    std::vector<std::string> parts;
    parts.reserve(assignment.size());
    for (const auto& [k, v] : assignment) parts.push_back(k + "=" + v);
    std::sort(parts.begin(), parts.end());
    std::string id;
    for (const auto& p : parts) {
        if (!id.empty()) id += ';';
        id += p;
    }
    return id.empty() ? "base" : id;
}

std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '=')
                   ? c
                   : '_';
    }
    return out.size() > 120 ? out.substr(0, 120) : out;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int parallelism, const std::string& out_dir) {
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    const std::size_t n_points = spec.point_count();
    SweepResult result;
    result.points.resize(n_points);

    // materialize the point assignments in axis-major order
    for (std::size_t idx = 0; idx < n_points; ++idx) {
        std::size_t rem = idx;
        SweepPoint& point = result.points[idx];
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& [path, values] = spec.axes[a];
            std::size_t vi = rem % values.size();
            rem /= values.size();
            const yaml::Node& v = values[vi];
            point.assignment.emplace_back(path, v.is_scalar() ? v.as_string() : v.canonical());
        }
        std::reverse(point.assignment.begin(), point.assignment.end());
        point.point_id = make_point_id(point.assignment);
    }

    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= n_points) return;
            SweepPoint& point = result.points[idx];
            try {
                yaml::Node config = spec.base_config;
                std::size_t rem = idx;
                for (std::size_t a = spec.axes.size(); a-- > 0;) {
                    const auto& [path, values] = spec.axes[a];
                    yaml::set_path(config, path, values[rem % values.size()]);
                    rem /= values.size();
                }
                double thr = 0.0, ttft = 0.0, tpot = 0.0;
                for (int rep = 0; rep < spec.repetitions; ++rep) {
                    std::uint64_t seed = sweep_point_seed(spec.base_seed, point.point_id, rep);
                    ResolvedConfig rc = resolve_config(config, true, seed, spec.base_dir);
                    SimulationOutput out = run_simulation(rc);
                    RunAggregates agg = aggregate_run(out.result);
                    thr += agg.throughput_rps;
                    ttft += agg.mean_ttft_ms;
                    tpot += agg.mean_tpot_ms;
                    if (!out_dir.empty()) {
                        std::string file = out_dir + "/" + sanitize_filename(point.point_id) +
                                           "_rep" + std::to_string(rep) + ".json";
                        std::lock_guard<std::mutex> lock(io_mutex);
                        write_file(file, out.report_json);
                        point.report_files.push_back(file);
                    }
                }
                point.mean_throughput_rps = thr / spec.repetitions;
                point.mean_ttft_ms = ttft / spec.repetitions;
                point.mean_tpot_ms = tpot / spec.repetitions;
            } catch (const std::exception& e) {
                point.failed = true;
                point.error = e.what();
            }
        }
    };

    int width = std::max(1, parallelism);
    if (width == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(width));
        for (int i = 0; i < width; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

std::string sweep_summary_csv(const SweepResult& result) {
    std::string out = "point,failed,throughput_rps,mean_ttft_ms,mean_tpot_ms\n";
    for (const auto& p : result.points) {
        out += "\"" + p.point_id + "\"," + (p.failed ? "1" : "0") + ',';
        out += format_fixed(p.mean_throughput_rps, 6) + ',' + format_fixed(p.mean_ttft_ms, 3) +
               ',' + format_fixed(p.mean_tpot_ms, 3) + '\n';
    }
    return out;
}

std::string sweep_summary_json(const SweepResult& result) {
    JsonWriter w;
    w.begin_object();
    w.key("points").begin_array();
    for (const auto& p : result.points) {
        w.begin_object();
        w.key("point").value(p.point_id);
        w.key("assignment").begin_object();
        for (const auto& [k, v] : p.assignment) w.key(k).value(v);
        w.end_object();
        w.key("failed").value(p.failed);
        if (p.failed) {
            w.key("error").value(p.error);
        } else {
            w.key("throughput_rps").value_fixed(p.mean_throughput_rps, 6);
            w.key("mean_ttft_ms").value_fixed(p.mean_ttft_ms, 3);
            w.key("mean_tpot_ms").value_fixed(p.mean_tpot_ms, 3);
        }
        w.end_object();
    }
    w.end_array();
    w.end_object();
    std::string out = w.take();
    out += '\n';
    return out;
}

}  // namespace specsim
