#include "specsim/util/json_writer.hpp"

#include <cmath>
#include <cstdio>

#include "specsim/util/fnv.hpp"

namespace specsim {

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string format_fixed(double v, int decimals) {
    if (!std::isfinite(v)) return "null";
    // Avoid "-0.000" so equal metrics serialize identically.
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return std::string(buf);
}

std::string format_exact(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

void JsonWriter::escape_into(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
}

void JsonWriter::newline_indent() {
    if (!pretty_) return;
    out_ += '\n';
    out_.append(2 * stack_.size(), ' ');
}

void JsonWriter::before_value() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!stack_.empty()) {
        if (stack_.back().second++ > 0) out_ += ',';
        newline_indent();
    }
}

JsonWriter& JsonWriter::begin_object() {
    before_value();
    stack_.emplace_back(false, 0);
    out_ += '{';
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    bool had_items = stack_.back().second > 0;
    stack_.pop_back();
    if (had_items) newline_indent();
    out_ += '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    before_value();
    stack_.emplace_back(true, 0);
    out_ += '[';
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    bool had_items = stack_.back().second > 0;
    stack_.pop_back();
    if (had_items) newline_indent();
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    if (stack_.back().second++ > 0) out_ += ',';
    newline_indent();
    out_ += '"';
    escape_into(out_, k);
    out_ += pretty_ ? "\": " : "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
    before_value();
    out_ += '"';
    escape_into(out_, s);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
    before_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
    before_value();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    before_value();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value_null() {
    before_value();
    out_ += "null";
    return *this;
}

JsonWriter& JsonWriter::value_fixed(double v, int decimals) {
    before_value();
    out_ += format_fixed(v, decimals);
    return *this;
}

JsonWriter& JsonWriter::value_exact(double v) {
    before_value();
    out_ += format_exact(v);
    return *this;
}

}  // namespace specsim
