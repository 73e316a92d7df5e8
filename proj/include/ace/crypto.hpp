#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "ace/bytes.hpp"

namespace ace::crypto {

// Purpose labels for the key-derivation hierarchy.
inline constexpr std::string_view kInfoEd25519Solana = "ACEGF-V1-ED25519-SOLANA";
inline constexpr std::string_view kInfoEd25519Polkadot = "ACEGF-V1-ED25519-POLKADOT";
inline constexpr std::string_view kInfoSecp256k1Evm = "ACEGF-V1-SECP256K1-EVM";
inline constexpr std::string_view kInfoSecp256k1Btc = "ACEGF-V1-SECP256K1-BTC";
inline constexpr std::string_view kInfoSecp256k1Cosmos = "ACEGF-V1-SECP256K1-COSMOS";
inline constexpr std::string_view kInfoX25519Identity = "ACEGF-V1-X25519-IDENTITY";
inline constexpr std::string_view kInfoMlDsa44Pqc = "ACEGF-V1-ML-DSA-44-PQC-IDENTITY";
inline constexpr std::string_view kInfoMempoolAttest = "ACEGF-V1-MEMPOOL-ATTEST";
inline constexpr std::string_view kInfoValidatorConsensus = "ACEGF-V1-VALIDATOR-CONSENSUS";
inline constexpr std::string_view kInfoValidatorVote = "ACEGF-V1-VALIDATOR-VOTE";

inline constexpr std::array<std::string_view, 7> kCanonicalStreamInfos = {
    kInfoEd25519Solana,  kInfoEd25519Polkadot, kInfoSecp256k1Evm, kInfoSecp256k1Btc,
    kInfoSecp256k1Cosmos, kInfoX25519Identity,  kInfoMlDsa44Pqc};

// Root entropy value. 32 bytes; must never appear in any wire encoding.
class Rev {
public:
    static std::optional<Rev> from_bytes(std::span<const std::uint8_t> bytes);
    static Rev from_seed(std::uint64_t seed);  // test/sim convenience

    std::span<const std::uint8_t, 32> bytes() const { return bytes_; }

private:
    Rev() = default;
    std::array<std::uint8_t, 32> bytes_{};
};

struct DerivedKey {
    Hash32 bytes{};
    Bytes info;
    Bytes salt;

    bool operator==(const DerivedKey&) const = default;
};

// Attestation binding scope: 2-byte chain id followed by a 48-bit slot.
struct Domain {
    std::uint16_t chain_id = 0;
    std::uint64_t slot = 0;  // < 2^48

    static constexpr std::uint64_t kMaxSlot = (1ULL << 48) - 1;

    std::array<std::uint8_t, 8> encode() const;
    static std::optional<Domain> decode(std::span<const std::uint8_t> bytes);

    bool operator==(const Domain&) const = default;
};

struct IdCommitment {
    Hash32 bytes{};
    Hash32 salt{};
    Domain domain;

    bool operator==(const IdCommitment&) const = default;
};

struct Attestation {
    Hash32 obj_hash{};
    Hash32 id_com{};
    Domain domain;
    Hash32 credential{};

    static constexpr std::size_t kEncodedSize = 104;

    std::array<std::uint8_t, kEncodedSize> encode() const;
    static std::optional<Attestation> decode(std::span<const std::uint8_t> bytes);

    bool operator==(const Attestation&) const = default;
};

enum class AttestationCheck {
    Accept,
    PayloadMismatch,
    CredentialMismatch,
};

DerivedKey derive_key(const Rev& rev, std::span<const std::uint8_t> info,
                      std::span<const std::uint8_t> salt);
DerivedKey derive_key(const Rev& rev, std::string_view info, std::span<const std::uint8_t> salt);

std::array<DerivedKey, 7> derive_canonical_streams(const Rev& rev);

struct ValidatorKeys {
    DerivedKey consensus;
    DerivedKey attest;
    DerivedKey vote;
};

// Consensus/attest/vote key triple. The attest key is scoped to `domain`,
// the consensus key to the validator id, and the vote key to the epoch.
ValidatorKeys derive_validator_keys(const Rev& rev, std::span<const std::uint8_t> validator_id,
                                    std::uint64_t epoch, const Domain& domain);

IdCommitment id_commitment(const Rev& rev, const Hash32& salt, const Domain& domain);

DerivedKey derive_attest_key(const Rev& rev, const Domain& domain);

Attestation generate_attestation(const Rev& rev, std::span<const std::uint8_t> payload,
                                 const Domain& domain, const IdCommitment& id_com);

// Full recomputation check: payload binding plus HMAC credential under the
// key derived from `rev` for the attestation's own domain. This is the test
// oracle; validators run only the light check (see pipeline).
AttestationCheck verify_attestation_full(const Attestation& att,
                                         std::span<const std::uint8_t> payload, const Rev& rev);

// Argon2id passphrase encapsulation (m=4096 KiB, t=3, p=1). Salt is 16 bytes.
Rev encapsulate_rev(std::string_view passphrase, std::span<const std::uint8_t, 16> salt);

const char* to_string(AttestationCheck c);

}  // namespace ace::crypto
