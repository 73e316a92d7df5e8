#include "ace/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

#include "ace/hkdf.hpp"
#include "ace/sha256.hpp"

namespace ace::crypto {

namespace {

inline std::span<const std::uint8_t> sv_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::optional<Rev> Rev::from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 32) return std::nullopt;
    Rev r;
    std::memcpy(r.bytes_.data(), bytes.data(), 32);
    return r;
}

Rev Rev::from_seed(std::uint64_t seed) {
    std::uint8_t buf[16] = {'r', 'e', 'v', '-', 's', 'e', 'e', 'd'};
    put_u64be(buf + 8, seed);
    Hash32 h = sha256::digest({buf, 16});
    return *from_bytes(h);
}

std::array<std::uint8_t, 8> Domain::encode() const {
    std::array<std::uint8_t, 8> out{};
    put_u16be(out.data(), chain_id);
    // 48-bit slot, big-endian
    for (int i = 0; i < 6; ++i) {
        out[2 + i] = static_cast<std::uint8_t>(slot >> (40 - 8 * i));
    }
    return out;
}

std::optional<Domain> Domain::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 8) return std::nullopt;
    Domain d;
    d.chain_id = get_u16be(bytes.data());
    d.slot = 0;
    for (int i = 0; i < 6; ++i) {
        d.slot = (d.slot << 8) | bytes[2 + i];
    }
    return d;
}

std::array<std::uint8_t, Attestation::kEncodedSize> Attestation::encode() const {
    std::array<std::uint8_t, kEncodedSize> out{};
    std::memcpy(out.data(), obj_hash.data(), 32);
    std::memcpy(out.data() + 32, id_com.data(), 32);
    auto dom = domain.encode();
    std::memcpy(out.data() + 64, dom.data(), 8);
    std::memcpy(out.data() + 72, credential.data(), 32);
    return out;
}

std::optional<Attestation> Attestation::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kEncodedSize) return std::nullopt;
    Attestation a;
    std::memcpy(a.obj_hash.data(), bytes.data(), 32);
    std::memcpy(a.id_com.data(), bytes.data() + 32, 32);
    auto dom = Domain::decode(bytes.subspan(64, 8));
    if (!dom) return std::nullopt;
    a.domain = *dom;
    std::memcpy(a.credential.data(), bytes.data() + 72, 32);
    return a;
}

DerivedKey derive_key(const Rev& rev, std::span<const std::uint8_t> info,
                      std::span<const std::uint8_t> salt) {
    if (info.empty()) {
        throw std::invalid_argument("derive_key: info must be non-empty");
    }
    Bytes okm = hkdf_sha256(rev.bytes(), salt, info, 32);
    DerivedKey k;
    std::memcpy(k.bytes.data(), okm.data(), 32);
    k.info.assign(info.begin(), info.end());
    k.salt.assign(salt.begin(), salt.end());
    return k;
}

DerivedKey derive_key(const Rev& rev, std::string_view info, std::span<const std::uint8_t> salt) {
    return derive_key(rev, sv_bytes(info), salt);
}

std::array<DerivedKey, 7> derive_canonical_streams(const Rev& rev) {
    std::array<DerivedKey, 7> out;
    for (std::size_t i = 0; i < kCanonicalStreamInfos.size(); ++i) {
        out[i] = derive_key(rev, kCanonicalStreamInfos[i], {});
    }
    return out;
}

ValidatorKeys derive_validator_keys(const Rev& rev, std::span<const std::uint8_t> validator_id,
                                    std::uint64_t epoch, const Domain& domain) {
    ValidatorKeys keys;
    keys.consensus = derive_key(rev, kInfoValidatorConsensus, validator_id);
    auto dom = domain.encode();
    keys.attest = derive_key(rev, kInfoMempoolAttest, dom);
    std::uint8_t epoch_be[8];
    put_u64be(epoch_be, epoch);
    keys.vote = derive_key(rev, kInfoValidatorVote, {epoch_be, 8});
    return keys;
}

IdCommitment id_commitment(const Rev& rev, const Hash32& salt, const Domain& domain) {
    auto dom = domain.encode();
    IdCommitment c;
    c.bytes = sha256::digest_parts({rev.bytes(), salt, {dom.data(), dom.size()}});
    c.salt = salt;
    c.domain = domain;
    return c;
}

DerivedKey derive_attest_key(const Rev& rev, const Domain& domain) {
    auto dom = domain.encode();
    return derive_key(rev, kInfoMempoolAttest, {dom.data(), dom.size()});
}

Attestation generate_attestation(const Rev& rev, std::span<const std::uint8_t> payload,
                                 const Domain& domain, const IdCommitment& id_com) {
    Attestation att;
    att.obj_hash = sha256::digest(payload);
    att.id_com = id_com.bytes;
    att.domain = domain;
    DerivedKey k = derive_attest_key(rev, domain);
    auto dom = domain.encode();
    att.credential = hmac_sha256_parts(k.bytes, {att.obj_hash, {dom.data(), dom.size()}});
    return att;
}

AttestationCheck verify_attestation_full(const Attestation& att,
                                         std::span<const std::uint8_t> payload, const Rev& rev) {
    Hash32 h = sha256::digest(payload);
    if (!ct_equal(h, att.obj_hash)) {
        return AttestationCheck::PayloadMismatch;
    }
    DerivedKey k = derive_attest_key(rev, att.domain);
    auto dom = att.domain.encode();
    Hash32 expected = hmac_sha256_parts(k.bytes, {att.obj_hash, {dom.data(), dom.size()}});
    if (!ct_equal(expected, att.credential)) {
        return AttestationCheck::CredentialMismatch;
    }
    return AttestationCheck::Accept;
}

Rev encapsulate_rev(std::string_view passphrase, std::span<const std::uint8_t, 16> salt) {
    if (sodium_init() < 0) {
        throw std::runtime_error("libsodium initialization failed");
    }
    std::array<std::uint8_t, 32> out{};
    // Argon2id with m=4096 KiB, t=3; libsodium pins p=1 for this algorithm.
    if (crypto_pwhash(out.data(), out.size(),
                      passphrase.data(), passphrase.size(), salt.data(),
                      3 /*opslimit*/, 4096ULL * 1024 /*memlimit bytes*/,
                      crypto_pwhash_ALG_ARGON2ID13) != 0) {
        throw std::runtime_error("argon2id key derivation failed");
    }
    return *Rev::from_bytes(out);
}

const char* to_string(AttestationCheck c) {
    switch (c) {
        case AttestationCheck::Accept: return "Accept";
        case AttestationCheck::PayloadMismatch: return "PayloadMismatch";
        case AttestationCheck::CredentialMismatch: return "CredentialMismatch";
    }
    return "?";
}

}  // namespace ace::crypto
