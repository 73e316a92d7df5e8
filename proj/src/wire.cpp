#include "ace/wire.hpp"

#include <cstring>

#include "ace/sha256.hpp"

namespace ace::wire {

Bytes TxPayload::encode() const {
    Bytes out;
    out.reserve(2 + 8 + 1 + accounts.size() * 33 + 32 + 32 + 2 + instruction.size());
    append_u16be(out, version);
    append_u64be(out, nonce);
    out.push_back(static_cast<std::uint8_t>(accounts.size()));
    for (const auto& acct : accounts) {
        append(out, acct.id);
        out.push_back(acct.writable ? 1 : 0);
    }
    append(out, program_id);
    append(out, recent_blockhash);
    append_u16be(out, static_cast<std::uint16_t>(instruction.size()));
    append(out, instruction);
    return out;
}

std::optional<TxPayload> TxPayload::decode(std::span<const std::uint8_t> bytes) {
    TxPayload p;
    std::size_t off = 0;
    auto need = [&](std::size_t n) { return off + n <= bytes.size(); };
    if (!need(11)) return std::nullopt;
    p.version = get_u16be(bytes.data() + off);
    off += 2;
    p.nonce = get_u64be(bytes.data() + off);
    off += 8;
    std::uint8_t n_accounts = bytes[off++];
    if (!need(static_cast<std::size_t>(n_accounts) * 33)) return std::nullopt;
    p.accounts.resize(n_accounts);
    for (auto& acct : p.accounts) {
        std::memcpy(acct.id.data(), bytes.data() + off, 32);
        off += 32;
        std::uint8_t flags = bytes[off++];
        if (flags > 1) return std::nullopt;
        acct.writable = flags != 0;
    }
    if (!need(32 + 32 + 2)) return std::nullopt;
    std::memcpy(p.program_id.data(), bytes.data() + off, 32);
    off += 32;
    std::memcpy(p.recent_blockhash.data(), bytes.data() + off, 32);
    off += 32;
    std::uint16_t instr_len = get_u16be(bytes.data() + off);
    off += 2;
    if (!need(instr_len)) return std::nullopt;
    p.instruction.assign(bytes.begin() + off, bytes.begin() + off + instr_len);
    off += instr_len;
    if (off != bytes.size()) return std::nullopt;
    return p;
}

Bytes make_transfer_payload(const AccountId& from, const AccountId& to, std::uint64_t amount,
                            std::uint64_t nonce, const Hash32& recent_blockhash) {
    TxPayload p;
    p.nonce = nonce;
    p.accounts = {{from, true}, {to, true}};
    p.program_id = AccountId{};  // system program
    p.recent_blockhash = recent_blockhash;
    p.instruction.resize(11);
    p.instruction[0] = static_cast<std::uint8_t>(Opcode::Transfer);
    p.instruction[1] = 0;
    p.instruction[2] = 1;
    put_u64be(p.instruction.data() + 3, amount);
    return p.encode();
}

std::array<std::uint8_t, BlockHeader::kEncodedSize> BlockHeader::encode() const {
    std::array<std::uint8_t, kEncodedSize> out{};
    std::uint8_t* p = out.data();
    put_u64be(p, slot_number);
    p += 8;
    std::memcpy(p, parent_hash.data(), 32);
    p += 32;
    std::memcpy(p, state_root.data(), 32);
    p += 32;
    std::memcpy(p, tx_merkle_root.data(), 32);
    p += 32;
    std::memcpy(p, attest_merkle_root.data(), 32);
    p += 32;
    std::memcpy(p, poh_hash.data(), 32);
    p += 32;
    std::memcpy(p, leader_id_com.data(), 32);
    p += 32;
    put_u64be(p, timestamp_ms);
    p += 8;
    put_u32be(p, tx_count);
    // remaining 44 bytes stay zero
    return out;
}

std::optional<BlockHeader> BlockHeader::decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kEncodedSize) return std::nullopt;
    for (std::size_t i = kFieldBytes; i < kEncodedSize; ++i) {
        if (bytes[i] != 0) return std::nullopt;
    }
    BlockHeader h;
    const std::uint8_t* p = bytes.data();
    h.slot_number = get_u64be(p);
    p += 8;
    std::memcpy(h.parent_hash.data(), p, 32);
    p += 32;
    std::memcpy(h.state_root.data(), p, 32);
    p += 32;
    std::memcpy(h.tx_merkle_root.data(), p, 32);
    p += 32;
    std::memcpy(h.attest_merkle_root.data(), p, 32);
    p += 32;
    std::memcpy(h.poh_hash.data(), p, 32);
    p += 32;
    std::memcpy(h.leader_id_com.data(), p, 32);
    p += 32;
    h.timestamp_ms = get_u64be(p);
    p += 8;
    h.tx_count = get_u32be(p);
    return h;
}

std::array<std::uint8_t, FinalityCertificate::kEncodedSize> FinalityCertificate::encode() const {
    std::array<std::uint8_t, kEncodedSize> out{};
    std::memcpy(out.data(), block_hash.data(), 32);
    put_u64be(out.data() + 32, slot_number);
    std::memcpy(out.data() + 40, proof.data(), 256);
    std::memcpy(out.data() + 296, public_inputs_commitment.data(), 32);
    return out;
}

std::optional<FinalityCertificate> FinalityCertificate::decode(
    std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kEncodedSize) return std::nullopt;
    FinalityCertificate fc;
    std::memcpy(fc.block_hash.data(), bytes.data(), 32);
    fc.slot_number = get_u64be(bytes.data() + 32);
    std::memcpy(fc.proof.data(), bytes.data() + 40, 256);
    std::memcpy(fc.public_inputs_commitment.data(), bytes.data() + 296, 32);
    return fc;
}

Bytes encode_transaction_record(const Transaction& tx) {
    const std::size_t body_len =
        2 + tx.payload.size() + 1 + tx.context_tag.size() + crypto::Attestation::kEncodedSize;
    Bytes out;
    out.reserve(4 + body_len);
    append_u32be(out, static_cast<std::uint32_t>(body_len));
    append_u16be(out, static_cast<std::uint16_t>(tx.payload.size()));
    append(out, tx.payload);
    out.push_back(static_cast<std::uint8_t>(tx.context_tag.size()));
    append(out, tx.context_tag);
    auto att = tx.attestation.encode();
    append(out, att);
    return out;
}

std::optional<Transaction> decode_transaction_record(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) return std::nullopt;
    std::uint32_t body_len = get_u32be(bytes.data());
    if (bytes.size() != 4 + static_cast<std::size_t>(body_len)) return std::nullopt;
    auto body = bytes.subspan(4);
    if (body.size() < 3) return std::nullopt;
    std::uint16_t payload_len = get_u16be(body.data());
    std::size_t off = 2;
    if (off + payload_len + 1 > body.size()) return std::nullopt;
    Transaction tx;
    tx.payload.assign(body.begin() + off, body.begin() + off + payload_len);
    off += payload_len;
    std::uint8_t tag_len = body[off++];
    if (off + tag_len + crypto::Attestation::kEncodedSize != body.size()) return std::nullopt;
    tx.context_tag.assign(body.begin() + off, body.begin() + off + tag_len);
    off += tag_len;
    auto att = crypto::Attestation::decode(body.subspan(off));
    if (!att) return std::nullopt;
    tx.attestation = *att;
    return tx;
}

Bytes encode_block(const Block& b) {
    Bytes out;
    auto header = b.header.encode();
    append(out, header);
    for (const auto& tx : b.transactions) {
        Bytes rec = encode_transaction_record(tx);
        append(out, rec);
    }
    return out;
}

std::optional<Block> decode_block(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < BlockHeader::kEncodedSize) return std::nullopt;
    auto header = BlockHeader::decode(bytes.subspan(0, BlockHeader::kEncodedSize));
    if (!header) return std::nullopt;
    Block b;
    b.header = *header;
    std::size_t off = BlockHeader::kEncodedSize;
    while (off < bytes.size()) {
        if (off + 4 > bytes.size()) return std::nullopt;
        std::uint32_t body_len = get_u32be(bytes.data() + off);
        std::size_t rec_len = 4 + static_cast<std::size_t>(body_len);
        if (off + rec_len > bytes.size()) return std::nullopt;
        auto tx = decode_transaction_record(bytes.subspan(off, rec_len));
        if (!tx) return std::nullopt;
        b.transactions.push_back(std::move(*tx));
        off += rec_len;
    }
    if (b.transactions.size() != b.header.tx_count) return std::nullopt;
    return b;
}

Hash32 block_hash(const BlockHeader& h) {
    auto enc = h.encode();
    return sha256::digest(enc);
}

Hash32 block_hash(const Block& b) {
    return block_hash(b.header);
}

Hash32 merkle_root(std::span<const Hash32> leaves) {
    if (leaves.empty()) return kZeroHash;

    // Leaf level: H(0x00 || leaf), hashed 8 lanes at a time.
    std::vector<Hash32> level(leaves.size());
    {
        Bytes msgs(leaves.size() * 33);
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            msgs[i * 33] = 0x00;
            std::memcpy(msgs.data() + i * 33 + 1, leaves[i].data(), 32);
        }
        sha256::hash_batch_strided(msgs.data(), 33, 33, leaves.size(),
                                   reinterpret_cast<std::uint8_t*>(level.data()));
    }

    Bytes msgs;
    while (level.size() > 1) {
        if (level.size() % 2 != 0) level.push_back(level.back());
        std::size_t pairs = level.size() / 2;
        msgs.resize(pairs * 65);
        for (std::size_t i = 0; i < pairs; ++i) {
            std::uint8_t* m = msgs.data() + i * 65;
            m[0] = 0x01;
            std::memcpy(m + 1, level[2 * i].data(), 32);
            std::memcpy(m + 33, level[2 * i + 1].data(), 32);
        }
        std::vector<Hash32> next(pairs);
        sha256::hash_batch_strided(msgs.data(), 65, 65, pairs,
                                   reinterpret_cast<std::uint8_t*>(next.data()));
        level = std::move(next);
    }
    return level[0];
}

Hash32 tx_merkle_root(const std::vector<Transaction>& txs) {
    std::vector<Hash32> leaves(txs.size());
    for (std::size_t i = 0; i < txs.size(); ++i) {
        leaves[i] = sha256::digest(txs[i].payload);
    }
    return merkle_root(leaves);
}

Hash32 attest_merkle_root(const std::vector<Transaction>& txs) {
    std::vector<Hash32> leaves(txs.size());
    for (std::size_t i = 0; i < txs.size(); ++i) {
        auto enc = txs[i].attestation.encode();
        leaves[i] = sha256::digest(enc);
    }
    return merkle_root(leaves);
}

}  // namespace ace::wire
