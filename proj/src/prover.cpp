#include "ace/prover.hpp"

#include <cstring>
#include <stdexcept>

#include "ace/hkdf.hpp"
#include "ace/sha256.hpp"
#include "ace/thread_pool.hpp"

namespace ace::prover {

namespace {

constexpr std::string_view kTagTxProof = "zk-tx-proof-v1";
constexpr std::string_view kTagAggProof = "zk-agg-proof-v1";
constexpr std::string_view kTagWitnessPad = "witness-pad-v1";
constexpr std::string_view kTagWitnessShare = "witness-share-v1";
constexpr std::string_view kTagWitnessStream = "witness-stream-v1";

inline std::span<const std::uint8_t> sv_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// seed = SHA-256(tag || digest); bytes = SHA-256(seed || ctr) for ctr 0..7.
void expand256(std::string_view tag, const Hash32& digest, std::uint8_t out[256]) {
    Hash32 seed = sha256::digest_parts({sv_bytes(tag), digest});
    std::uint8_t msgs[8][36];
    const std::uint8_t* ptrs[8];
    for (std::uint32_t c = 0; c < 8; ++c) {
        std::memcpy(msgs[c], seed.data(), 32);
        put_u32be(msgs[c] + 32, c);
        ptrs[c] = msgs[c];
    }
    sha256::hash_batch(ptrs, 36, 8, out);
}

std::string_view tag_for(ProofKind kind) {
    return kind == ProofKind::Tx ? kTagTxProof : kTagAggProof;
}

// Counter-mode keystream for the mock witness encryption.
Bytes keystream(const Hash32& key, std::size_t len) {
    Bytes out;
    out.reserve(len + 32);
    std::uint8_t msg[32 + 4 + kTagWitnessStream.size()];
    std::memcpy(msg, kTagWitnessStream.data(), kTagWitnessStream.size());
    std::memcpy(msg + kTagWitnessStream.size(), key.data(), 32);
    std::uint32_t ctr = 0;
    while (out.size() < len) {
        put_u32be(msg + kTagWitnessStream.size() + 32, ctr++);
        Hash32 block = sha256::digest({msg, sizeof(msg)});
        out.insert(out.end(), block.begin(), block.end());
    }
    out.resize(len);
    return out;
}

}  // namespace

WorkCounters& work_counters() {
    static WorkCounters counters;
    return counters;
}

PublicInputs PublicInputs::for_tx(const wire::Transaction& tx) {
    PublicInputs pub;
    pub.id_com = tx.attestation.id_com;
    pub.tx_hash = sha256::digest(tx.payload);
    auto dom = tx.attestation.domain.encode();
    std::memcpy(pub.domain.data(), dom.data(), dom.size());
    return pub;
}

Hash32 PublicInputs::digest() const {
    return sha256::digest_parts({id_com, tx_hash, domain, target, rp_com});
}

MockProof prove_public_inputs(const PublicInputs& pub) {
    MockProof p;
    p.kind = ProofKind::Tx;
    p.public_inputs_digest = pub.digest();
    expand256(kTagTxProof, p.public_inputs_digest, p.bytes.data());
    work_counters().tx_proofs.fetch_add(1, std::memory_order_relaxed);
    return p;
}

MockProof prove_tx(const wire::Transaction& tx) {
    return prove_public_inputs(PublicInputs::for_tx(tx));
}

bool verify_mock(const MockProof& proof) {
    std::uint8_t expected[256];
    expand256(tag_for(proof.kind), proof.public_inputs_digest, expected);
    return std::memcmp(expected, proof.bytes.data(), 256) == 0;
}

MockProof aggregate_pair(const MockProof& a, const MockProof& b) {
    MockProof p;
    p.kind = ProofKind::Aggregate;
    p.public_inputs_digest = sha256::digest_parts({a.bytes, b.bytes});
    expand256(kTagAggProof, p.public_inputs_digest, p.bytes.data());
    work_counters().aggregations.fetch_add(1, std::memory_order_relaxed);
    return p;
}

MockProof aggregate_tree(std::span<const MockProof> proofs, AggregationStats* stats) {
    if (proofs.empty()) {
        throw std::invalid_argument("aggregate_tree: empty proof list");
    }
    AggregationStats local;
    std::vector<MockProof> level(proofs.begin(), proofs.end());
    while (level.size() > 1) {
        ++local.levels;
        std::size_t pairs = level.size() / 2;
        std::vector<MockProof> next(pairs + (level.size() % 2));
        ThreadPool::global().parallel_for(pairs, [&](std::size_t i) {
            next[i] = aggregate_pair(level[2 * i], level[2 * i + 1]);
        });
        if (level.size() % 2) {
            next.back() = level.back();  // odd node promoted unchanged
        }
        local.pair_ops += pairs;
        level = std::move(next);
    }
    if (stats) *stats = local;
    return level[0];
}

MockProof prove_block(const wire::Block& block, AggregationStats* stats) {
    std::vector<MockProof> proofs(block.transactions.size());
    ThreadPool::global().parallel_for(proofs.size(), [&](std::size_t i) {
        proofs[i] = prove_tx(block.transactions[i]);
    });
    if (proofs.empty()) {
        // An empty block still carries one aggregate over the empty content.
        PublicInputs pub;
        pub.tx_hash = wire::block_hash(block);
        if (stats) *stats = {};
        return prove_public_inputs(pub);
    }
    return aggregate_tree(proofs, stats);
}

wire::FinalityCertificate build_finality_certificate(const wire::Block& block,
                                                     const MockProof& aggregate) {
    wire::FinalityCertificate fc;
    fc.block_hash = wire::block_hash(block);
    fc.slot_number = block.header.slot_number;
    std::memcpy(fc.proof.data(), aggregate.bytes.data(), 256);
    std::vector<Hash32> id_coms(block.transactions.size());
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        id_coms[i] = block.transactions[i].attestation.id_com;
    }
    fc.public_inputs_commitment = wire::merkle_root(id_coms);
    return fc;
}

FcCheck verify_finality_certificate(const wire::FinalityCertificate& fc, const wire::Block& block,
                                    std::uint64_t* cost_units) {
    if (cost_units) *cost_units += kFcVerifyCostUnits;
    if (fc.slot_number != block.header.slot_number) return FcCheck::SlotMismatch;
    if (fc.block_hash != wire::block_hash(block)) return FcCheck::HashMismatch;
    wire::FinalityCertificate expected = build_finality_certificate(block, prove_block(block));
    if (expected.proof != fc.proof) return FcCheck::ProofMismatch;
    if (expected.public_inputs_commitment != fc.public_inputs_commitment) {
        return FcCheck::ProofMismatch;
    }
    return FcCheck::Valid;
}

const char* to_string(FcCheck c) {
    switch (c) {
        case FcCheck::Valid: return "Valid";
        case FcCheck::SlotMismatch: return "SlotMismatch";
        case FcCheck::HashMismatch: return "HashMismatch";
        case FcCheck::ProofMismatch: return "ProofMismatch";
    }
    return "?";
}

Bytes build_witness(const Hash32& attest_key, const Hash32& tx_hash) {
    Bytes w(kWitnessBytes);
    std::memcpy(w.data(), attest_key.data(), 32);
    Hash32 pad_seed = sha256::digest_parts({sv_bytes(kTagWitnessPad), attest_key, tx_hash});
    Bytes pad = keystream(pad_seed, kWitnessBytes - 32);
    std::memcpy(w.data() + 32, pad.data(), pad.size());
    return w;
}

bool witness_matches_tx(std::span<const std::uint8_t> witness, const wire::Transaction& tx) {
    if (witness.size() != kWitnessBytes) return false;
    // The first 32 bytes must be the attest key that produced the credential.
    auto dom = tx.attestation.domain.encode();
    Hash32 expected = crypto::hmac_sha256_parts(
        witness.subspan(0, 32), {tx.attestation.obj_hash, {dom.data(), dom.size()}});
    return ct_equal(expected, tx.attestation.credential);
}

WitnessScheme::WitnessScheme(unsigned n_validators, const Hash32& master_seed)
    : n_(n_validators), t_((2 * n_validators + 2) / 3), master_(master_seed) {
    if (n_validators == 0) {
        throw std::invalid_argument("WitnessScheme: need at least one validator");
    }
}

std::vector<unsigned> WitnessScheme::share_indices(unsigned validator) const {
    // Share j lives on validators j .. j+(n-t) mod n.
    std::vector<unsigned> out;
    for (unsigned j = 0; j < t_; ++j) {
        unsigned span = n_ - t_;
        unsigned delta = (validator + n_ - j) % n_;
        if (delta <= span) out.push_back(j);
    }
    return out;
}

Hash32 WitnessScheme::share_value(const Hash32& tx_hash, unsigned index) const {
    std::uint8_t idx_be[4];
    put_u32be(idx_be, index);
    return sha256::digest_parts({sv_bytes(kTagWitnessShare), master_, tx_hash, {idx_be, 4}});
}

Hash32 WitnessScheme::tx_key(const Hash32& tx_hash) const {
    Hash32 key{};
    for (unsigned j = 0; j < t_; ++j) {
        Hash32 share = share_value(tx_hash, j);
        for (int i = 0; i < 32; ++i) key[i] ^= share[i];
    }
    return key;
}

WitnessBundle WitnessScheme::encapsulate(const Hash32& tx_hash,
                                         std::span<const std::uint8_t> witness) const {
    WitnessBundle b;
    b.tx_hash = tx_hash;
    b.share_threshold = t_;
    Bytes stream = keystream(tx_key(tx_hash), witness.size());
    b.ciphertext.resize(witness.size());
    for (std::size_t i = 0; i < witness.size(); ++i) {
        b.ciphertext[i] = witness[i] ^ stream[i];
    }
    return b;
}

Bytes WitnessScheme::decrypt(const WitnessBundle& bundle,
                             std::span<const unsigned> contributors) const {
    // XOR of whatever share values the contributors jointly cover; a full
    // cover of [0, t) reproduces the key, anything less yields garbage.
    std::set<unsigned> covered;
    for (unsigned v : contributors) {
        for (unsigned j : share_indices(v % n_)) covered.insert(j);
    }
    Hash32 key{};
    for (unsigned j : covered) {
        Hash32 share = share_value(bundle.tx_hash, j);
        for (int i = 0; i < 32; ++i) key[i] ^= share[i];
    }
    Bytes stream = keystream(key, bundle.ciphertext.size());
    Bytes plain(bundle.ciphertext.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
        plain[i] = bundle.ciphertext[i] ^ stream[i];
    }
    return plain;
}

BackupResult backup_prove(const wire::Block& block,
                          const std::map<Hash32, WitnessBundle>& bundles,
                          const std::map<unsigned, std::set<Hash32>>& holders,
                          const WitnessScheme& scheme) {
    const unsigned t = scheme.threshold();
    BackupUnavailable shortfall;
    std::vector<Bytes> witnesses(block.transactions.size());

    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const auto& tx = block.transactions[i];
        Hash32 tx_hash = sha256::digest(tx.payload);
        auto bundle_it = bundles.find(tx_hash);
        std::vector<unsigned> contributors;
        for (const auto& [validator, held] : holders) {
            if (held.count(tx_hash)) contributors.push_back(validator);
        }
        if (bundle_it == bundles.end() || contributors.size() < t) {
            shortfall.missing_tx_hashes.push_back(tx_hash);
            continue;
        }
        Bytes witness = scheme.decrypt(bundle_it->second, contributors);
        if (!witness_matches_tx(witness, tx)) {
            shortfall.missing_tx_hashes.push_back(tx_hash);
            continue;
        }
        witnesses[i] = std::move(witness);
    }
    if (!shortfall.missing_tx_hashes.empty()) {
        return shortfall;
    }
    // Witnesses validated; the certificate matches the builder path exactly.
    MockProof root = prove_block(block);
    return build_finality_certificate(block, root);
}

ProverService::ProverService() {
    worker_ = std::thread([this] { run(); });
}

ProverService::~ProverService() {
    {
        std::lock_guard lk(mu_);
        stop_ = true;
    }
    cv_in_.notify_all();
    worker_.join();
}

void ProverService::enqueue(wire::Block block) {
    {
        std::lock_guard lk(mu_);
        in_.push_back(std::move(block));
    }
    enqueued_.fetch_add(1, std::memory_order_relaxed);
    cv_in_.notify_one();
}

std::optional<ProverService::Result> ProverService::try_pop_result() {
    std::lock_guard lk(mu_);
    if (out_.empty()) return std::nullopt;
    Result r = std::move(out_.front());
    out_.pop_front();
    return r;
}

ProverService::Result ProverService::wait_result() {
    std::unique_lock lk(mu_);
    cv_out_.wait(lk, [this] { return !out_.empty(); });
    Result r = std::move(out_.front());
    out_.pop_front();
    return r;
}

void ProverService::run() {
    for (;;) {
        wire::Block block;
        {
            std::unique_lock lk(mu_);
            cv_in_.wait(lk, [this] { return stop_ || !in_.empty(); });
            if (in_.empty()) return;
            block = std::move(in_.front());
            in_.pop_front();
        }
        MockProof root = prove_block(block);
        Result r{std::move(block), {}};
        r.fc = build_finality_certificate(r.block, root);
        {
            std::lock_guard lk(mu_);
            out_.push_back(std::move(r));
        }
        proved_.fetch_add(1, std::memory_order_relaxed);
        cv_out_.notify_all();
    }
}

}  // namespace ace::prover
