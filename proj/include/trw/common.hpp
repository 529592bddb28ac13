#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace trw {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u8 = std::uint8_t;

// Argument-contract violations.
inline void check_arg(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Range/window violations.
inline void check_range(bool cond, const std::string& msg) {
    if (!cond) throw std::out_of_range(msg);
}

// Parse / file-format violations.
inline void check_parse(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

// FNV-1a over raw bytes. Used for parameter fingerprints and input digests;
// change detection only, not cryptographic.
inline u64 fnv1a(const void* data, std::size_t n, u64 h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(u64 v);

}  // namespace trw
