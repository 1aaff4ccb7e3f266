#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "specsim/util/yaml.hpp"

namespace specsim {

enum class Role : std::uint8_t { Draft, Target };

struct DeviceSpec {
    int device_id = 0;
    std::string model_name;
    std::string hardware_name;
    Role role = Role::Target;
    int gpu_count = 1;
    int group = 0;  // declaration group the device was expanded from

    bool operator==(const DeviceSpec&) const = default;
};

struct LinkSpec {
    double rtt_ms = 0.0;
    double jitter_ms = 0.0;

    bool operator==(const LinkSpec&) const = default;
};

enum class RoutingKind : std::uint8_t { Random, RoundRobin, Jsq };
enum class BatchingKind : std::uint8_t { Fifo, Lab };
enum class WindowKind : std::uint8_t { Static, Dynamic, Awc, Fused };

struct BatchingConfig {
    BatchingKind kind = BatchingKind::Fifo;
    int max_batch_size = 8;
    std::int64_t batching_window_us = 0;
    double similarity_fraction = 0.2;  // LAB length band

    bool operator==(const BatchingConfig&) const = default;
};

struct WindowConfig {
    WindowKind kind = WindowKind::Static;
    int gamma = 4;       // static value, and the dynamic/awc initial gamma
    int gamma_min = 1;
    int gamma_max = 12;
    std::string model_path;  // awc only

    bool operator==(const WindowConfig&) const = default;
};

struct PolicyConfig {
    RoutingKind routing = RoutingKind::Random;
    BatchingConfig batching;
    WindowConfig window;
    int queue_capacity = 64;    // per-target, for queue-depth utilization
    int draft_max_batch = 1;

    bool operator==(const PolicyConfig&) const = default;
};

// Expanded deployment: explicit draft/target pools with dense, stable device
// ids (group declaration order, then index within group) plus a link spec
// for every (draft, target) pair. Immutable after expansion.
struct Topology {
    std::vector<DeviceSpec> drafts;
    std::vector<DeviceSpec> targets;
    LinkSpec default_link;
    // keyed by (draft group, target group); pairs not present use default_link
    std::map<std::pair<int, int>, LinkSpec> link_overrides;
    PolicyConfig policy;

    const LinkSpec& link(int draft_id, int target_id) const;

    // Serializes the expanded pools back to a config fragment; re-expanding
    // it yields an identical topology (expansion idempotence).
    yaml::Node to_config_node() const;

    bool operator==(const Topology&) const = default;
};

// Parses the YAML deployment file. Defaults are applied during expansion,
// not here.
yaml::Node parse_config(const std::string& path);

// Expands the high-level spec into explicit pools. strict=true rejects
// unknown keys anywhere in the document.
Topology auto_topology(const yaml::Node& config, bool strict = true);

}  // namespace specsim
