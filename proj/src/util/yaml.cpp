#include "specsim/util/yaml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "specsim/errors.hpp"
#include "specsim/util/json_writer.hpp"

namespace specsim::yaml {

namespace {

struct Line {
    int indent = 0;
    std::string text;  // content with indentation stripped
    int number = 0;    // 1-based source line
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("yaml line " + std::to_string(line) + ": " + msg);
}

// Strips a trailing comment that is not inside double quotes.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"') quoted = !quoted;
        if (c == '#' && !quoted && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
            return s.substr(0, i);
        }
    }
    return s;
}

std::string rtrim(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    return s;
}

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        std::string stripped = rtrim(strip_comment(raw));
        std::size_t ind = 0;
        while (ind < stripped.size() && stripped[ind] == ' ') ++ind;
        if (ind < stripped.size() && stripped[ind] == '\t') fail(ln, "tabs are not allowed for indentation");
        if (ind >= stripped.size()) continue;  // blank or comment-only
        out.push_back(Line{static_cast<int>(ind), stripped.substr(ind), ln});
    }
    return out;
}

bool looks_like_int(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

bool looks_like_double(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

Node scalar_from(const std::string& raw, int line) {
    Node n;
    if (raw.size() >= 2 && raw.front() == '"') {
        if (raw.back() != '"') fail(line, "unterminated quoted string");
        n.type = Node::Type::String;
        std::string body = raw.substr(1, raw.size() - 2);
        std::string out;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '\\' && i + 1 < body.size()) {
                char c = body[++i];
                switch (c) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: out += c;
                }
            } else {
                out += body[i];
            }
        }
        n.s = out;
        return n;
    }
    if (raw == "null" || raw == "~") return n;
    if (raw == "true" || raw == "false") {
        n.type = Node::Type::Bool;
        n.b = (raw == "true");
        return n;
    }
    if (looks_like_int(raw)) {
        n.type = Node::Type::Int;
        n.i = std::strtoll(raw.c_str(), nullptr, 10);
        return n;
    }
    if (looks_like_double(raw)) {
        n.type = Node::Type::Double;
        n.d = std::strtod(raw.c_str(), nullptr);
        return n;
    }
    n.type = Node::Type::String;
    n.s = raw;
    return n;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

Node parse_flow_seq(const std::string& raw, int line) {
    // [a, b, c] with scalar elements only.
    Node n;
    n.type = Node::Type::Sequence;
    std::string body = trim(raw.substr(1, raw.size() - 2));
    if (body.empty()) return n;
    std::string item;
    bool quoted = false;
    auto flush = [&]() {
        std::string t = trim(item);
        if (t.empty()) fail(line, "empty element in flow sequence");
        n.seq.push_back(scalar_from(t, line));
        item.clear();
    };
    for (char c : body) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            flush();
        } else {
            item += c;
        }
    }
    flush();
    return n;
}

Node value_from_inline(const std::string& raw, int line) {
    std::string t = trim(raw);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') fail(line, "unterminated flow sequence");
        return parse_flow_seq(t, line);
    }
    return scalar_from(t, line);
}

// Splits "key: rest"; returns false when the line has no top-level colon.
bool split_key(const std::string& text, int line, std::string& key, std::string& rest) {
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '"') quoted = !quoted;
        if (c == ':' && !quoted && (i + 1 == text.size() || text[i + 1] == ' ')) {
            key = trim(text.substr(0, i));
            rest = (i + 1 < text.size()) ? trim(text.substr(i + 1)) : "";
            if (key.empty()) fail(line, "empty key");
            if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
                key = key.substr(1, key.size() - 2);
            return true;
        }
    }
    return false;
}

class Parser {
public:
    explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

    Node parse_document() {
        if (lines_.empty()) return Node{};
        Node root = parse_block(lines_[0].indent);
        if (pos_ < lines_.size()) fail(lines_[pos_].number, "unexpected de-indented content");
        return root;
    }

private:
    Node parse_block(int indent) {
        const Line& first = lines_[pos_];
        if (first.indent != indent) fail(first.number, "inconsistent indentation");
        if (first.text[0] == '-' && (first.text.size() == 1 || first.text[1] == ' ')) {
            return parse_sequence(indent);
        }
        return parse_mapping(indent);
    }

    Node parse_sequence(int indent) {
        Node n;
        n.type = Node::Type::Sequence;
        while (pos_ < lines_.size() && lines_[pos_].indent == indent &&
               lines_[pos_].text[0] == '-' &&
               (lines_[pos_].text.size() == 1 || lines_[pos_].text[1] == ' ')) {
            Line item = lines_[pos_];
            std::string content = item.text.size() > 1 ? trim(item.text.substr(1)) : "";
            if (content.empty()) {
                ++pos_;
                if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
                    n.seq.push_back(parse_block(lines_[pos_].indent));
                } else {
                    n.seq.push_back(Node{});
                }
                continue;
            }
            std::string key, rest;
            if (split_key(content, item.number, key, rest)) {
                // "- key: value" starts an inline map; its continuation lines
                // are indented to the column where the key begins.
                int inner = indent + static_cast<int>(item.text.size() - content.size());
                lines_[pos_] = Line{inner, content, item.number};
                n.seq.push_back(parse_mapping(inner));
            } else {
                ++pos_;
                n.seq.push_back(value_from_inline(content, item.number));
            }
        }
        return n;
    }

    Node parse_mapping(int indent) {
        Node n;
        n.type = Node::Type::Mapping;
        while (pos_ < lines_.size() && lines_[pos_].indent == indent) {
            const Line line = lines_[pos_];
            if (line.text[0] == '-' && (line.text.size() == 1 || line.text[1] == ' ')) break;
            std::string key, rest;
            if (!split_key(line.text, line.number, key, rest)) {
                fail(line.number, "expected 'key: value'");
            }
            for (const auto& kv : n.map) {
                if (kv.first == key) fail(line.number, "duplicate key '" + key + "'");
            }
            ++pos_;
            if (!rest.empty()) {
                n.map.emplace_back(key, value_from_inline(rest, line.number));
            } else if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
                n.map.emplace_back(key, parse_block(lines_[pos_].indent));
            } else {
                n.map.emplace_back(key, Node{});
            }
        }
        return n;
    }

    std::vector<Line> lines_;
    std::size_t pos_ = 0;
};

void canonical_into(const Node& n, std::string& out) {
    switch (n.type) {
        case Node::Type::Null: out += "null"; break;
        case Node::Type::Bool: out += n.b ? "true" : "false"; break;
        case Node::Type::Int: out += std::to_string(n.i); break;
        case Node::Type::Double: out += format_exact(n.d); break;
        case Node::Type::String:
            out += '"';
            JsonWriter::escape_into(out, n.s);
            out += '"';
            break;
        case Node::Type::Sequence: {
            out += '[';
            bool first = true;
            for (const auto& e : n.seq) {
                if (!first) out += ',';
                first = false;
                canonical_into(e, out);
            }
            out += ']';
            break;
        }
        case Node::Type::Mapping: {
            out += '{';
            bool first = true;
            for (const auto& kv : n.map) {
                if (!first) out += ',';
                first = false;
                out += '"';
                JsonWriter::escape_into(out, kv.first);
                out += "\":";
                canonical_into(kv.second, out);
            }
            out += '}';
            break;
        }
    }
}

}  // namespace

bool Node::has(const std::string& key) const { return find(key) != nullptr; }

const Node* Node::find(const std::string& key) const {
    if (type != Type::Mapping) return nullptr;
    for (const auto& kv : map)
        if (kv.first == key) return &kv.second;
    return nullptr;
}

const Node& Node::at(const std::string& key) const {
    const Node* n = find(key);
    if (!n) throw ConfigError("missing required key '" + key + "'");
    return *n;
}

std::int64_t Node::as_int() const {
    if (type == Type::Int) return i;
    throw ConfigError("expected integer value");
}

double Node::as_double() const {
    if (type == Type::Double) return d;
    if (type == Type::Int) return static_cast<double>(i);
    throw ConfigError("expected numeric value");
}

bool Node::as_bool() const {
    if (type == Type::Bool) return b;
    throw ConfigError("expected boolean value");
}

std::string Node::as_string() const {
    switch (type) {
        case Type::String: return s;
        case Type::Int: return std::to_string(i);
        case Type::Double: return format_exact(d);
        case Type::Bool: return b ? "true" : "false";
        default: throw ConfigError("expected scalar value");
    }
}

std::int64_t Node::get_int(const std::string& key, std::int64_t dflt) const {
    const Node* n = find(key);
    return n && !n->is_null() ? n->as_int() : dflt;
}

double Node::get_double(const std::string& key, double dflt) const {
    const Node* n = find(key);
    return n && !n->is_null() ? n->as_double() : dflt;
}

bool Node::get_bool(const std::string& key, bool dflt) const {
    const Node* n = find(key);
    return n && !n->is_null() ? n->as_bool() : dflt;
}

std::string Node::get_string(const std::string& key, const std::string& dflt) const {
    const Node* n = find(key);
    return n && !n->is_null() ? n->as_string() : dflt;
}

void Node::set(const std::string& key, Node v) {
    if (type == Type::Null) type = Type::Mapping;
    if (type != Type::Mapping) throw ConfigError("set() on non-mapping node");
    for (auto& kv : map) {
        if (kv.first == key) {
            kv.second = std::move(v);
            return;
        }
    }
    map.emplace_back(key, std::move(v));
}

std::string Node::canonical() const {
    std::string out;
    canonical_into(*this, out);
    return out;
}

Node Node::make_int(std::int64_t v) {
    Node n;
    n.type = Type::Int;
    n.i = v;
    return n;
}

Node Node::make_double(double v) {
    Node n;
    n.type = Type::Double;
    n.d = v;
    return n;
}

Node Node::make_bool(bool v) {
    Node n;
    n.type = Type::Bool;
    n.b = v;
    return n;
}

Node Node::make_string(std::string v) {
    Node n;
    n.type = Type::String;
    n.s = std::move(v);
    return n;
}

Node Node::make_seq(std::vector<Node> items) {
    Node n;
    n.type = Type::Sequence;
    n.seq = std::move(items);
    return n;
}

Node Node::make_map() {
    Node n;
    n.type = Type::Mapping;
    return n;
}

Node parse_string(const std::string& text) {
    Parser p(split_lines(text));
    return p.parse_document();
}

Node parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

const Node* find_path(const Node& root, const std::string& dotted) {
    const Node* cur = &root;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        std::size_t dot = dotted.find('.', start);
        std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        cur = cur->find(part);
        if (!cur) return nullptr;
        if (dot == std::string::npos) return cur;
        start = dot + 1;
    }
    return nullptr;
}

void set_path(Node& root, const std::string& dotted, Node value) {
    Node* cur = &root;
    std::size_t start = 0;
    for (;;) {
        std::size_t dot = dotted.find('.', start);
        std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) {
            cur->set(part, std::move(value));
            return;
        }
        if (cur->type == Node::Type::Null) cur->type = Node::Type::Mapping;
        Node* next = nullptr;
        for (auto& kv : cur->map) {
            if (kv.first == part) {
                next = &kv.second;
                break;
            }
        }
        if (!next) {
            cur->map.emplace_back(part, Node::make_map());
            next = &cur->map.back().second;
        }
        cur = next;
        start = dot + 1;
    }
}

}  // namespace specsim::yaml
