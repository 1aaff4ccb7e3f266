#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace specsim {

// Streaming JSON writer with deterministic output: caller-controlled key
// order and fixed decimal formatting. Report files must be byte-identical
// across identical runs, which rules out generic double-to-string emitters.
class JsonWriter {
public:
    explicit JsonWriter(bool pretty = true) : pretty_(pretty) {}

    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();

    JsonWriter& key(std::string_view k);

    JsonWriter& value(std::string_view s);
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }
    JsonWriter& value(std::int64_t v);
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(bool v);
    JsonWriter& value_null();

    // Fixed "%.<decimals>f" formatting. decimals=3 for millisecond fields.
    JsonWriter& value_fixed(double v, int decimals);
    // Round-trip-exact "%.17g" formatting, for weights and stats.
    JsonWriter& value_exact(double v);

    const std::string& str() const { return out_; }
    std::string take() { return std::move(out_); }

    static void escape_into(std::string& out, std::string_view s);

private:
    void before_value();
    void newline_indent();

    std::string out_;
    // one frame per open container: (is_array, item_count)
    std::vector<std::pair<bool, int>> stack_;
    bool pending_key_ = false;
    bool pretty_ = true;
};

std::string format_fixed(double v, int decimals);
std::string format_exact(double v);

}  // namespace specsim
