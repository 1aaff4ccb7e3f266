#include "specsim/config/topology.hpp"

#include <algorithm>
#include <set>

#include "specsim/errors.hpp"
#include "specsim/latency/profile.hpp"

namespace specsim {

namespace {

void check_keys(const yaml::Node& node, const std::set<std::string>& allowed,
                const std::string& where, bool strict) {
    if (!strict || !node.is_map()) return;
    for (const auto& kv : node.map) {
        if (!allowed.count(kv.first)) {
            throw ConfigError("unknown key '" + kv.first + "' in " + where +
                              " (use lenient mode to ignore)");
        }
    }
}

struct Group {
    int count = 1;
    std::string model;
    std::string hardware;
    int gpu_count = 1;
};

std::vector<Group> parse_groups(const yaml::Node& pool, Role role, const std::string& where,
                                bool strict) {
    const std::string dflt_model = role == Role::Draft ? kDraftModel : kTargetModel;
    const std::string dflt_hw = role == Role::Draft ? kEdgeHardware : kCloudHardware;

    auto one = [&](const yaml::Node& g) {
        check_keys(g, {"count", "model", "hardware", "gpu_count"}, where, strict);
        Group grp;
        grp.count = static_cast<int>(g.get_int("count", 1));
        grp.model = g.get_string("model", dflt_model);
        grp.hardware = g.get_string("hardware", dflt_hw);
        grp.gpu_count = static_cast<int>(g.get_int("gpu_count", 1));
        if (grp.count < 0) throw ConfigError(where + ": count must be >= 0");
        if (grp.gpu_count < 1) throw ConfigError(where + ": gpu_count must be >= 1");
        return grp;
    };

    std::vector<Group> groups;
    if (pool.is_null()) {
        return groups;
    } else if (pool.type == yaml::Node::Type::Int) {
        Group g{static_cast<int>(pool.i), dflt_model, dflt_hw, 1};
        if (g.count < 0) throw ConfigError(where + ": count must be >= 0");
        if (g.count > 0) groups.push_back(g);
    } else if (pool.is_seq()) {
        for (const auto& g : pool.seq) groups.push_back(one(g));
    } else if (pool.is_map() && pool.has("groups")) {
        check_keys(pool, {"count", "groups"}, where, strict);
        for (const auto& g : pool.at("groups").seq) groups.push_back(one(g));
        if (pool.has("count")) {
            std::int64_t declared = pool.get_int("count", 0);
            std::int64_t total = 0;
            for (const auto& g : groups) total += g.count;
            if (declared != total) {
                throw ConfigError(where + ": declared count " + std::to_string(declared) +
                                  " does not match group total " + std::to_string(total));
            }
        }
    } else if (pool.is_map()) {
        groups.push_back(one(pool));
    } else {
        throw ConfigError(where + ": expected a count, a group, or a list of groups");
    }
    return groups;
}

RoutingKind routing_from(const std::string& s) {
    if (s == "random") return RoutingKind::Random;
    if (s == "rr" || s == "round_robin" || s == "round-robin") return RoutingKind::RoundRobin;
    if (s == "jsq") return RoutingKind::Jsq;
    throw ConfigError("unknown routing policy '" + s + "'");
}

BatchingKind batching_from(const std::string& s) {
    if (s == "fifo") return BatchingKind::Fifo;
    if (s == "lab") return BatchingKind::Lab;
    throw ConfigError("unknown batching policy '" + s + "'");
}

WindowKind window_from(const std::string& s) {
    if (s == "static") return WindowKind::Static;
    if (s == "dynamic") return WindowKind::Dynamic;
    if (s == "awc") return WindowKind::Awc;
    if (s == "fused") return WindowKind::Fused;
    throw ConfigError("unknown window policy '" + s + "'");
}

const char* routing_name(RoutingKind k) {
    switch (k) {
        case RoutingKind::Random: return "random";
        case RoutingKind::RoundRobin: return "rr";
        case RoutingKind::Jsq: return "jsq";
    }
    return "?";
}

const char* batching_name(BatchingKind k) {
    return k == BatchingKind::Fifo ? "fifo" : "lab";
}

const char* window_name(WindowKind k) {
    switch (k) {
        case WindowKind::Static: return "static";
        case WindowKind::Dynamic: return "dynamic";
        case WindowKind::Awc: return "awc";
        case WindowKind::Fused: return "fused";
    }
    return "?";
}

PolicyConfig parse_policies(const yaml::Node& config, bool strict) {
    PolicyConfig p;
    const yaml::Node* pol = config.find("policies");
    if (!pol || pol->is_null()) return p;
    check_keys(*pol, {"routing", "batching", "window", "queue_capacity", "draft_max_batch"},
               "policies", strict);
    p.routing = routing_from(pol->get_string("routing", "random"));
    if (const yaml::Node* b = pol->find("batching")) {
        if (b->is_scalar()) {
            p.batching.kind = batching_from(b->as_string());
        } else if (b->is_map()) {
            check_keys(*b, {"kind", "max_batch_size", "batching_window_us", "similarity_fraction"},
                       "policies.batching", strict);
            p.batching.kind = batching_from(b->get_string("kind", "fifo"));
            p.batching.max_batch_size = static_cast<int>(b->get_int("max_batch_size", 8));
            p.batching.batching_window_us = b->get_int("batching_window_us", 0);
            p.batching.similarity_fraction = b->get_double("similarity_fraction", 0.2);
        }
    }
    if (const yaml::Node* w = pol->find("window")) {
        if (w->is_scalar()) {
            p.window.kind = window_from(w->as_string());
        } else if (w->is_map()) {
            check_keys(*w, {"kind", "gamma", "gamma_min", "gamma_max", "model"},
                       "policies.window", strict);
            p.window.kind = window_from(w->get_string("kind", "static"));
            p.window.gamma = static_cast<int>(w->get_int("gamma", 4));
            p.window.gamma_min = static_cast<int>(w->get_int("gamma_min", 1));
            p.window.gamma_max = static_cast<int>(w->get_int("gamma_max", 12));
            p.window.model_path = w->get_string("model", "");
        }
    }
    p.queue_capacity = static_cast<int>(pol->get_int("queue_capacity", 64));
    p.draft_max_batch = static_cast<int>(pol->get_int("draft_max_batch", 1));

    if (p.batching.max_batch_size < 1) throw ConfigError("batching.max_batch_size must be >= 1");
    if (p.batching.similarity_fraction < 0.0)
        throw ConfigError("batching.similarity_fraction must be >= 0");
    if (p.window.gamma_min < 1 || p.window.gamma_max < p.window.gamma_min)
        throw ConfigError("window gamma bounds must satisfy 1 <= gamma_min <= gamma_max");
    if (p.window.kind == WindowKind::Static &&
        (p.window.gamma < p.window.gamma_min || p.window.gamma > p.window.gamma_max))
        throw ConfigError("static window gamma out of [gamma_min, gamma_max]");
    if (p.queue_capacity < 1) throw ConfigError("queue_capacity must be >= 1");
    return p;
}

}  // namespace

yaml::Node parse_config(const std::string& path) { return yaml::parse_file(path); }

const LinkSpec& Topology::link(int draft_id, int target_id) const {
    const DeviceSpec& d = drafts.at(static_cast<std::size_t>(draft_id));
    const DeviceSpec& t = targets.at(static_cast<std::size_t>(target_id));
    auto it = link_overrides.find({d.group, t.group});
    return it == link_overrides.end() ? default_link : it->second;
}

Topology auto_topology(const yaml::Node& config, bool strict) {
    if (!config.is_map()) throw ConfigError("config root must be a mapping");
    check_keys(config,
               {"targets", "drafts", "network", "policies", "workload", "seed",
                "latency_profile"},
               "config", strict);

    Topology topo;
    std::vector<Group> target_groups =
        parse_groups(config.find("targets") ? *config.find("targets") : yaml::Node{},
                     Role::Target, "targets", strict);
    std::vector<Group> draft_groups =
        parse_groups(config.find("drafts") ? *config.find("drafts") : yaml::Node{}, Role::Draft,
                     "drafts", strict);

    int id = 0;
    int group_idx = 0;
    for (const auto& g : target_groups) {
        for (int i = 0; i < g.count; ++i) {
            topo.targets.push_back(
                DeviceSpec{id++, g.model, g.hardware, Role::Target, g.gpu_count, group_idx});
        }
        ++group_idx;
    }
    id = 0;
    group_idx = 0;
    for (const auto& g : draft_groups) {
        for (int i = 0; i < g.count; ++i) {
            topo.drafts.push_back(
                DeviceSpec{id++, g.model, g.hardware, Role::Draft, g.gpu_count, group_idx});
        }
        ++group_idx;
    }

    if (topo.targets.empty()) throw ConfigError("target pool must be non-empty");

    if (const yaml::Node* net = config.find("network"); net && !net->is_null()) {
        check_keys(*net, {"rtt_ms", "jitter_ms", "overrides"}, "network", strict);
        topo.default_link.rtt_ms = net->get_double("rtt_ms", 0.0);
        topo.default_link.jitter_ms = net->get_double("jitter_ms", 0.0);
        if (const yaml::Node* ov = net->find("overrides"); ov && ov->is_seq()) {
            for (const auto& o : ov->seq) {
                check_keys(o, {"draft_group", "target_group", "rtt_ms", "jitter_ms"},
                           "network.overrides", strict);
                int dg = static_cast<int>(o.get_int("draft_group", 0));
                int tg = static_cast<int>(o.get_int("target_group", 0));
                if (dg < 0 || dg >= static_cast<int>(draft_groups.size()) || tg < 0 ||
                    tg >= static_cast<int>(target_groups.size())) {
                    throw ConfigError("network override references a group out of range");
                }
                LinkSpec l;
                l.rtt_ms = o.get_double("rtt_ms", topo.default_link.rtt_ms);
                l.jitter_ms = o.get_double("jitter_ms", topo.default_link.jitter_ms);
                topo.link_overrides[{dg, tg}] = l;
            }
        }
    }
    auto check_link = [](const LinkSpec& l) {
        if (l.rtt_ms < 0.0 || l.jitter_ms < 0.0)
            throw ConfigError("link rtt_ms/jitter_ms must be >= 0");
        if (l.jitter_ms > l.rtt_ms)
            throw ConfigError("link jitter_ms must not exceed rtt_ms");
    };
    check_link(topo.default_link);
    for (const auto& [key, l] : topo.link_overrides) check_link(l);

    topo.policy = parse_policies(config, strict);
    if (topo.drafts.empty() && topo.policy.window.kind != WindowKind::Fused) {
        throw ConfigError("empty draft pool requires the fused window policy");
    }
    return topo;
}

yaml::Node Topology::to_config_node() const {
    using yaml::Node;
    Node root = Node::make_map();

    auto pool_node = [](const std::vector<DeviceSpec>& devices) {
        std::vector<Node> groups;
        std::size_t i = 0;
        while (i < devices.size()) {
            std::size_t j = i;
            while (j < devices.size() && devices[j].group == devices[i].group) ++j;
            Node g = Node::make_map();
            g.set("count", Node::make_int(static_cast<std::int64_t>(j - i)));
            g.set("model", Node::make_string(devices[i].model_name));
            g.set("hardware", Node::make_string(devices[i].hardware_name));
            g.set("gpu_count", Node::make_int(devices[i].gpu_count));
            groups.push_back(std::move(g));
            i = j;
        }
        return Node::make_seq(std::move(groups));
    };
    root.set("targets", pool_node(targets));
    if (!drafts.empty()) root.set("drafts", pool_node(drafts));

    Node net = Node::make_map();
    net.set("rtt_ms", Node::make_double(default_link.rtt_ms));
    net.set("jitter_ms", Node::make_double(default_link.jitter_ms));
    if (!link_overrides.empty()) {
        std::vector<Node> ovs;
        for (const auto& [key, l] : link_overrides) {
            Node o = Node::make_map();
            o.set("draft_group", Node::make_int(key.first));
            o.set("target_group", Node::make_int(key.second));
            o.set("rtt_ms", Node::make_double(l.rtt_ms));
            o.set("jitter_ms", Node::make_double(l.jitter_ms));
            ovs.push_back(std::move(o));
        }
        net.set("overrides", Node::make_seq(std::move(ovs)));
    }
    root.set("network", std::move(net));

    Node pol = Node::make_map();
    pol.set("routing", Node::make_string(routing_name(policy.routing)));
    Node b = Node::make_map();
    b.set("kind", Node::make_string(batching_name(policy.batching.kind)));
    b.set("max_batch_size", Node::make_int(policy.batching.max_batch_size));
    b.set("batching_window_us", Node::make_int(policy.batching.batching_window_us));
    b.set("similarity_fraction", Node::make_double(policy.batching.similarity_fraction));
    pol.set("batching", std::move(b));
    Node w = Node::make_map();
    w.set("kind", Node::make_string(window_name(policy.window.kind)));
    w.set("gamma", Node::make_int(policy.window.gamma));
    w.set("gamma_min", Node::make_int(policy.window.gamma_min));
    w.set("gamma_max", Node::make_int(policy.window.gamma_max));
    if (!policy.window.model_path.empty())
        w.set("model", Node::make_string(policy.window.model_path));
    pol.set("window", std::move(w));
    pol.set("queue_capacity", Node::make_int(policy.queue_capacity));
    pol.set("draft_max_batch", Node::make_int(policy.draft_max_batch));
    root.set("policies", std::move(pol));
    return root;
}

}  // namespace specsim
