#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace specsim::yaml {

// Minimal YAML subset used for configs and sweep specs: block mappings,
// block sequences, flow sequences of scalars, and plain/double-quoted
// scalars. No anchors, tags, or multi-line strings.
class Node {
public:
    enum class Type { Null, Bool, Int, Double, String, Sequence, Mapping };

    Type type = Type::Null;
    bool b = false;
    std::int64_t i = 0;
    double d = 0.0;
    std::string s;
    std::vector<Node> seq;
    std::vector<std::pair<std::string, Node>> map;  // declaration order kept

    bool is_null() const { return type == Type::Null; }
    bool is_scalar() const {
        return type != Type::Sequence && type != Type::Mapping && type != Type::Null;
    }
    bool is_seq() const { return type == Type::Sequence; }
    bool is_map() const { return type == Type::Mapping; }

    bool has(const std::string& key) const;
    const Node* find(const std::string& key) const;
    const Node& at(const std::string& key) const;  // throws ConfigError

    // Typed accessors with coercion (Int -> Double) and clear errors.
    std::int64_t as_int() const;
    double as_double() const;
    bool as_bool() const;
    std::string as_string() const;

    std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
    double get_double(const std::string& key, double dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;

    void set(const std::string& key, Node v);

    // Canonical single-line rendering, used for digests and sweep-point ids.
    std::string canonical() const;

    static Node make_int(std::int64_t v);
    static Node make_double(double v);
    static Node make_bool(bool v);
    static Node make_string(std::string v);
    static Node make_seq(std::vector<Node> items);
    static Node make_map();
};

Node parse_string(const std::string& text);
Node parse_file(const std::string& path);

// Dotted-path helpers for sweep-axis overrides ("network.rtt_ms").
const Node* find_path(const Node& root, const std::string& dotted);
void set_path(Node& root, const std::string& dotted, Node value);

}  // namespace specsim::yaml
