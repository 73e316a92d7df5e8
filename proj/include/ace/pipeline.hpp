#pragma once

#include <deque>
#include <map>
#include <set>
#include <vector>

#include "ace/bytes.hpp"
#include "ace/executor.hpp"
#include "ace/prover.hpp"
#include "ace/wire.hpp"

namespace ace::pipeline {

struct PipelineConfig {
    std::size_t max_txs_per_block = 2000;
    std::uint64_t domain_window_slots = 2;
    std::uint64_t slot_duration_ms = 400;
    unsigned parallelism = 0;  // 0 = all hardware threads
};

class IdentityRegistry {
public:
    void add(const Hash32& id_com) { ids_.insert(id_com); }
    bool contains(const Hash32& id_com) const { return ids_.count(id_com) != 0; }
    std::size_t size() const { return ids_.size(); }

private:
    std::set<Hash32> ids_;
};

enum class LightCheck : std::uint8_t {
    AcceptPendingProof,
    PayloadBinding,
    UnknownIdentity,
    StaleDomain,
};

// Per-transaction operation counts for the light check; each field advances
// by a constant per transaction regardless of batch size.
struct LightCheckCounters {
    std::uint64_t sha256_ops = 0;
    std::uint64_t registry_probes = 0;
    std::uint64_t window_checks = 0;

    LightCheckCounters& operator+=(const LightCheckCounters& o) {
        sha256_ops += o.sha256_ops;
        registry_probes += o.registry_probes;
        window_checks += o.window_checks;
        return *this;
    }
};

// Structural acceptance only: payload binding, identity existence, domain
// freshness. No HMAC recomputation happens here; the credential is covered
// by the block proof.
LightCheck attest_check_light(const wire::Transaction& tx, const IdentityRegistry& registry,
                              std::uint64_t current_slot, const PipelineConfig& cfg,
                              LightCheckCounters* counters = nullptr);

class Mempool {
public:
    // Plain admission: structural size checks only.
    void submit(wire::Transaction tx);
    // Admission with the accompanying witness; rejects transactions whose
    // witness fails the credential binding (forged credentials die here,
    // before they can poison a block).
    bool submit_with_witness(wire::Transaction tx, std::span<const std::uint8_t> witness,
                             prover::WitnessBundle bundle);

    std::vector<wire::Transaction> select(std::size_t max);
    void requeue(std::vector<wire::Transaction> txs);

    std::size_t pending() const { return pending_.size(); }
    std::uint64_t rejected_witness_invalid() const { return rejected_witness_invalid_; }

    IdentityRegistry& registry() { return registry_; }
    const IdentityRegistry& registry() const { return registry_; }

    const prover::WitnessBundle* witness_bundle(const Hash32& tx_hash) const;
    std::map<Hash32, prover::WitnessBundle> take_bundles(const std::vector<Hash32>& tx_hashes);
    void drop_bundle(const Hash32& tx_hash);

private:
    std::deque<wire::Transaction> pending_;
    IdentityRegistry registry_;
    std::map<Hash32, prover::WitnessBundle> witness_store_;
    std::uint64_t rejected_witness_invalid_ = 0;
};

struct PhaseTimings {
    // Wall-clock microseconds, measured.
    std::uint64_t attest_us = 0;
    std::uint64_t execute_us = 0;
    std::uint64_t state_root_us = 0;
    std::uint64_t build_us = 0;
    std::uint64_t total_us = 0;
    // Simulated microseconds, filled by the caller's cost model when driven
    // from the simulator; zero otherwise.
    std::uint64_t sim_attest_us = 0;
    std::uint64_t sim_execute_us = 0;
};

struct SlotResult {
    wire::Block block;
    std::vector<std::pair<wire::Transaction, LightCheck>> rejected;
    std::vector<executor::TxDelta> deltas;
    PhaseTimings timings;
    LightCheckCounters counters;
    std::size_t selected_count = 0;
};

struct LeaderContext {
    std::uint64_t slot = 0;
    Hash32 parent_hash{};
    Hash32 poh_hash{};
    Hash32 leader_id_com{};
    std::uint64_t timestamp_ms = 0;
};

// One leader slot: select, light-check, execute, build, hand off to the
// prover queue. No proof work happens on this path.
SlotResult process_slot(const LeaderContext& ctx, Mempool& mempool,
                        executor::AccountState& state, const PipelineConfig& cfg,
                        prover::ProverService* prover = nullptr);

enum class ReplicaCheck : std::uint8_t {
    Vote,
    RootMismatch,
    AttestFailure,
    StateRootMismatch,
};

// Replica-side validation: recompute both Merkle roots, light-check every
// transaction, re-execute and compare the state root.
ReplicaCheck replica_verify_block(const wire::Block& block, const IdentityRegistry& registry,
                                  const executor::AccountState& pre_state,
                                  const PipelineConfig& cfg,
                                  executor::AccountState* post_state = nullptr);

const char* to_string(LightCheck c);
const char* to_string(ReplicaCheck c);

}  // namespace ace::pipeline
