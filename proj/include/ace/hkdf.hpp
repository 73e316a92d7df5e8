#pragma once

#include <span>

#include "ace/bytes.hpp"

namespace ace::crypto {

// HMAC-SHA256 (RFC 2104).
Hash32 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg);
Hash32 hmac_sha256_parts(std::span<const std::uint8_t> key,
                         std::initializer_list<std::span<const std::uint8_t>> msg_parts);

// HKDF-SHA256 (RFC 5869). An empty salt is treated as 32 zero bytes.
Hash32 hkdf_extract(std::span<const std::uint8_t> salt, std::span<const std::uint8_t> ikm);
Bytes hkdf_expand(const Hash32& prk, std::span<const std::uint8_t> info, std::size_t out_len);
Bytes hkdf_sha256(std::span<const std::uint8_t> ikm, std::span<const std::uint8_t> salt,
                  std::span<const std::uint8_t> info, std::size_t out_len);

}  // namespace ace::crypto
