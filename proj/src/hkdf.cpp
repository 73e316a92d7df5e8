#include "ace/hkdf.hpp"

#include <cstring>
#include <stdexcept>

#include "ace/sha256.hpp"

namespace ace::crypto {

namespace {

struct HmacCtx {
    sha256::Hasher inner;
    std::uint8_t opad_key[64];

    explicit HmacCtx(std::span<const std::uint8_t> key) {
        std::uint8_t kblock[64] = {0};
        if (key.size() > 64) {
            Hash32 kh = sha256::digest(key);
            std::memcpy(kblock, kh.data(), 32);
        } else {
            std::memcpy(kblock, key.data(), key.size());
        }
        std::uint8_t ipad[64];
        for (int i = 0; i < 64; ++i) {
            ipad[i] = kblock[i] ^ 0x36;
            opad_key[i] = kblock[i] ^ 0x5c;
        }
        inner.update({ipad, 64});
    }

    Hash32 finish() {
        Hash32 ih = inner.finalize();
        sha256::Hasher outer;
        outer.update({opad_key, 64});
        outer.update(ih);
        return outer.finalize();
    }
};

}  // namespace

Hash32 hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg) {
    HmacCtx ctx(key);
    ctx.inner.update(msg);
    return ctx.finish();
}

Hash32 hmac_sha256_parts(std::span<const std::uint8_t> key,
                         std::initializer_list<std::span<const std::uint8_t>> msg_parts) {
    HmacCtx ctx(key);
    for (auto p : msg_parts) ctx.inner.update(p);
    return ctx.finish();
}

Hash32 hkdf_extract(std::span<const std::uint8_t> salt, std::span<const std::uint8_t> ikm) {
    static constexpr std::uint8_t zero_salt[32] = {0};
    if (salt.empty()) {
        return hmac_sha256({zero_salt, 32}, ikm);
    }
    return hmac_sha256(salt, ikm);
}

Bytes hkdf_expand(const Hash32& prk, std::span<const std::uint8_t> info, std::size_t out_len) {
    if (out_len > 255 * 32) {
        throw std::invalid_argument("hkdf_expand: output length too large");
    }
    Bytes okm;
    okm.reserve(out_len);
    Hash32 t{};
    std::size_t tlen = 0;
    std::uint8_t counter = 1;
    while (okm.size() < out_len) {
        std::uint8_t ctr[1] = {counter++};
        Hash32 block = hmac_sha256_parts(prk, {{t.data(), tlen}, info, {ctr, 1}});
        t = block;
        tlen = 32;
        std::size_t take = std::min<std::size_t>(32, out_len - okm.size());
        okm.insert(okm.end(), block.begin(), block.begin() + take);
    }
    return okm;
}

Bytes hkdf_sha256(std::span<const std::uint8_t> ikm, std::span<const std::uint8_t> salt,
                  std::span<const std::uint8_t> info, std::size_t out_len) {
    Hash32 prk = hkdf_extract(salt, ikm);
    return hkdf_expand(prk, info, out_len);
}

}  // namespace ace::crypto
