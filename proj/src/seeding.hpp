#pragma once

#include <cstdint>
#include <string_view>

namespace reassembly::seeding {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stream seed for one named item under a run seed; stable across platforms.
inline std::uint64_t derive(std::uint64_t seed, std::string_view name, std::uint64_t salt = 0) {
    return splitmix64(seed ^ splitmix64(fnv1a(name) + salt));
}

}  // namespace reassembly::seeding
