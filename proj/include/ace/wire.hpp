#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ace/bytes.hpp"
#include "ace/crypto.hpp"

namespace ace::wire {

using AccountId = std::array<std::uint8_t, 32>;

struct DeclaredAccount {
    AccountId id{};
    bool writable = false;

    bool operator==(const DeclaredAccount&) const = default;
};

// Instruction opcodes carried in the payload body.
enum class Opcode : std::uint8_t {
    Transfer = 1,      // from_idx u8, to_idx u8, amount u64
    CreateAccount = 2, // funder_idx u8, target_idx u8, initial_balance u64
    WriteData = 3,     // target_idx u8, len u16, bytes
    Mint = 4,          // target_idx u8, amount u64
};

// Parsed form of the canonical transaction payload:
//   version u16 | nonce u64 | n_accounts u8 | n x (id 32, flags u8) |
//   program_id 32 | recent_blockhash 32 | instr_len u16 | instruction
struct TxPayload {
    std::uint16_t version = 1;
    std::uint64_t nonce = 0;
    std::vector<DeclaredAccount> accounts;
    AccountId program_id{};
    Hash32 recent_blockhash{};
    Bytes instruction;

    Bytes encode() const;
    static std::optional<TxPayload> decode(std::span<const std::uint8_t> bytes);
};

// The reference 2-account transfer used throughout benchmarks; 154 bytes.
Bytes make_transfer_payload(const AccountId& from, const AccountId& to, std::uint64_t amount,
                            std::uint64_t nonce, const Hash32& recent_blockhash);
inline constexpr std::size_t kCanonicalTransferPayloadSize = 154;

struct Transaction {
    Bytes payload;
    Bytes context_tag;  // empty = none
    crypto::Attestation attestation;

    bool operator==(const Transaction&) const = default;
};

struct BlockHeader {
    std::uint64_t slot_number = 0;
    Hash32 parent_hash{};
    Hash32 state_root{};
    Hash32 tx_merkle_root{};
    Hash32 attest_merkle_root{};
    Hash32 poh_hash{};
    Hash32 leader_id_com{};
    std::uint64_t timestamp_ms = 0;
    std::uint32_t tx_count = 0;

    // 212 bytes of fields zero-padded to a fixed 256-byte region.
    static constexpr std::size_t kFieldBytes = 212;
    static constexpr std::size_t kEncodedSize = 256;

    std::array<std::uint8_t, kEncodedSize> encode() const;
    static std::optional<BlockHeader> decode(std::span<const std::uint8_t> bytes);

    bool operator==(const BlockHeader&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;

    bool operator==(const Block&) const = default;
};

struct FinalityCertificate {
    Hash32 block_hash{};
    std::uint64_t slot_number = 0;
    std::array<std::uint8_t, 256> proof{};
    Hash32 public_inputs_commitment{};

    static constexpr std::size_t kEncodedSize = 328;

    std::array<std::uint8_t, kEncodedSize> encode() const;
    static std::optional<FinalityCertificate> decode(std::span<const std::uint8_t> bytes);

    bool operator==(const FinalityCertificate&) const = default;
};

// Per-transaction record framing inside the block body:
//   u32 record_len | u16 payload_len | payload | u8 tag_len | tag | attestation(104)
Bytes encode_transaction_record(const Transaction& tx);
std::optional<Transaction> decode_transaction_record(std::span<const std::uint8_t> bytes);

Bytes encode_block(const Block& b);
std::optional<Block> decode_block(std::span<const std::uint8_t> bytes);

Hash32 block_hash(const Block& b);
Hash32 block_hash(const BlockHeader& h);

// Binary SHA-256 Merkle tree. Leaves are domain-separated with a 0x00 prefix
// and inner nodes with 0x01; an odd node count duplicates the last node.
// The empty list hashes to 32 zero bytes.
Hash32 merkle_root(std::span<const Hash32> leaves);

Hash32 tx_merkle_root(const std::vector<Transaction>& txs);
Hash32 attest_merkle_root(const std::vector<Transaction>& txs);

}  // namespace ace::wire
