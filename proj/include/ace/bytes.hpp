#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ace {

using Bytes = std::vector<std::uint8_t>;
using Hash32 = std::array<std::uint8_t, 32>;

inline constexpr Hash32 kZeroHash{};

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline void append(Bytes& out, std::span<const std::uint8_t> data) {
    out.insert(out.end(), data.begin(), data.end());
}

inline void put_u16be(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v);
}

inline void put_u32be(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 24);
    p[1] = static_cast<std::uint8_t>(v >> 16);
    p[2] = static_cast<std::uint8_t>(v >> 8);
    p[3] = static_cast<std::uint8_t>(v);
}

inline void put_u64be(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        p[i] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    }
}

inline std::uint16_t get_u16be(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

inline std::uint32_t get_u32be(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline std::uint64_t get_u64be(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v = (v << 8) | p[i];
    }
    return v;
}

inline void append_u16be(Bytes& out, std::uint16_t v) {
    std::uint8_t buf[2];
    put_u16be(buf, v);
    out.insert(out.end(), buf, buf + 2);
}

inline void append_u32be(Bytes& out, std::uint32_t v) {
    std::uint8_t buf[4];
    put_u32be(buf, v);
    out.insert(out.end(), buf, buf + 4);
}

inline void append_u64be(Bytes& out, std::uint64_t v) {
    std::uint8_t buf[8];
    put_u64be(buf, v);
    out.insert(out.end(), buf, buf + 8);
}

std::string hex_encode(std::span<const std::uint8_t> data);
std::optional<Bytes> hex_decode(std::string_view hex);

// Constant-time comparison for credential checks.
bool ct_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// True if `needle` occurs as a contiguous substring of `haystack`.
bool contains_subsequence(std::span<const std::uint8_t> haystack,
                          std::span<const std::uint8_t> needle);

}  // namespace ace
