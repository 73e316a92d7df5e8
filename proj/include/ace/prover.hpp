#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <thread>
#include <variant>
#include <vector>

#include "ace/bytes.hpp"
#include "ace/wire.hpp"

namespace ace::prover {

// Public inputs of one per-transaction proof, five 32-byte words; the 8-byte
// domain sits in the first bytes of its word, target/rp_com stay zero here.
struct PublicInputs {
    Hash32 id_com{};
    Hash32 tx_hash{};
    Hash32 domain{};
    Hash32 target{};
    Hash32 rp_com{};

    static PublicInputs for_tx(const wire::Transaction& tx);
    Hash32 digest() const;
};

enum class ProofKind : std::uint8_t { Tx, Aggregate };

// Hash-expanded stand-in for a real proof: 256 bytes derived from the public
// inputs digest, verifiable by recomputation.
struct MockProof {
    std::array<std::uint8_t, 256> bytes{};
    Hash32 public_inputs_digest{};
    ProofKind kind = ProofKind::Tx;

    bool operator==(const MockProof&) const = default;
};

// Work counters; the slot scheduler must never advance these.
struct WorkCounters {
    std::atomic<std::uint64_t> tx_proofs{0};
    std::atomic<std::uint64_t> aggregations{0};
};
WorkCounters& work_counters();

MockProof prove_public_inputs(const PublicInputs& pub);
MockProof prove_tx(const wire::Transaction& tx);
bool verify_mock(const MockProof& proof);
MockProof aggregate_pair(const MockProof& a, const MockProof& b);

struct AggregationStats {
    std::size_t levels = 0;
    std::size_t pair_ops = 0;
};

// Pairwise tree aggregation; an odd node is promoted unchanged. Throws on an
// empty list. Exactly ceil(log2(n)) levels.
MockProof aggregate_tree(std::span<const MockProof> proofs, AggregationStats* stats = nullptr);

MockProof prove_block(const wire::Block& block, AggregationStats* stats = nullptr);

wire::FinalityCertificate build_finality_certificate(const wire::Block& block,
                                                     const MockProof& aggregate);

enum class FcCheck { Valid, SlotMismatch, HashMismatch, ProofMismatch };

// Recomputes the whole proof tree from the block (O(n) here, one verification
// in the real system). `cost_units` charges the simulator's constant price.
FcCheck verify_finality_certificate(const wire::FinalityCertificate& fc, const wire::Block& block,
                                    std::uint64_t* cost_units = nullptr);
inline constexpr std::uint64_t kFcVerifyCostUnits = 1;

const char* to_string(FcCheck c);

// --- witness bundles for backup proving --------------------------------------

inline constexpr std::size_t kWitnessBytes = 256;

// Private inputs for one transaction. The first 32 bytes hold the attest key;
// a prover validates the key against the attestation credential before using
// the witness.
Bytes build_witness(const Hash32& attest_key, const Hash32& tx_hash);
bool witness_matches_tx(std::span<const std::uint8_t> witness, const wire::Transaction& tx);

struct WitnessBundle {
    Hash32 tx_hash{};
    Bytes ciphertext;
    std::uint32_t share_threshold = 0;

    bool operator==(const WitnessBundle&) const = default;
};

// Mock threshold scheme: the per-transaction key is the XOR of t shares,
// each share replicated on n-t+1 consecutive validators so that any t
// validators jointly cover every share index.
class WitnessScheme {
public:
    WitnessScheme(unsigned n_validators, const Hash32& master_seed);

    unsigned validators() const { return n_; }
    unsigned threshold() const { return t_; }

    std::vector<unsigned> share_indices(unsigned validator) const;
    Hash32 share_value(const Hash32& tx_hash, unsigned index) const;

    WitnessBundle encapsulate(const Hash32& tx_hash, std::span<const std::uint8_t> witness) const;

    // XOR-combines the distinct share values covered by `contributors`.
    // A cover gap yields a wrong key and hence garbage plaintext.
    Bytes decrypt(const WitnessBundle& bundle, std::span<const unsigned> contributors) const;

private:
    Hash32 tx_key(const Hash32& tx_hash) const;
    unsigned n_;
    unsigned t_;
    Hash32 master_;
};

struct BackupUnavailable {
    std::vector<Hash32> missing_tx_hashes;
};

using BackupResult = std::variant<wire::FinalityCertificate, BackupUnavailable>;

// Quorum backup path: decrypt every bundle with the contributors' shares,
// validate the witnesses, re-prove and emit a certificate byte-identical to
// the builder's. `holders` maps validator -> set of tx hashes it holds.
BackupResult backup_prove(const wire::Block& block,
                          const std::map<Hash32, WitnessBundle>& bundles,
                          const std::map<unsigned, std::set<Hash32>>& holders,
                          const WitnessScheme& scheme);

// --- async prover service -----------------------------------------------------

// Single-producer single-consumer hand-off between the slot scheduler and the
// proving thread; the queue is the only channel between the phases.
class ProverService {
public:
    ProverService();
    ~ProverService();

    void enqueue(wire::Block block);

    struct Result {
        wire::Block block;
        wire::FinalityCertificate fc;
    };
    std::optional<Result> try_pop_result();
    Result wait_result();

    std::uint64_t blocks_enqueued() const { return enqueued_.load(); }
    std::uint64_t blocks_proved() const { return proved_.load(); }

private:
    void run();

    std::mutex mu_;
    std::condition_variable cv_in_;
    std::condition_variable cv_out_;
    std::deque<wire::Block> in_;
    std::deque<Result> out_;
    bool stop_ = false;
    std::atomic<std::uint64_t> enqueued_{0};
    std::atomic<std::uint64_t> proved_{0};
    std::thread worker_;
};

}  // namespace ace::prover
