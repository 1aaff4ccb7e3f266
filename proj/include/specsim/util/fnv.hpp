#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace specsim {

// FNV-1a, used for config digests, model checksums and sweep point seeds.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t v);

}  // namespace specsim
