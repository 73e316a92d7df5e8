#include "ace/pipeline.hpp"

#include <chrono>

#include "ace/sha256.hpp"
#include "ace/thread_pool.hpp"

namespace ace::pipeline {

namespace {

std::uint64_t now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

LightCheck attest_check_light(const wire::Transaction& tx, const IdentityRegistry& registry,
                              std::uint64_t current_slot, const PipelineConfig& cfg,
                              LightCheckCounters* counters) {
    LightCheckCounters local;
    local.sha256_ops = 1;
    Hash32 payload_hash = sha256::digest(tx.payload);
    if (payload_hash != tx.attestation.obj_hash) {
        if (counters) *counters += local;
        return LightCheck::PayloadBinding;
    }
    local.registry_probes = 1;
    if (!registry.contains(tx.attestation.id_com)) {
        if (counters) *counters += local;
        return LightCheck::UnknownIdentity;
    }
    local.window_checks = 1;
    const std::uint64_t slot = tx.attestation.domain.slot;
    const std::uint64_t w = cfg.domain_window_slots;
    bool fresh = slot <= current_slot + w && current_slot <= slot + w;
    if (counters) *counters += local;
    if (!fresh) return LightCheck::StaleDomain;
    return LightCheck::AcceptPendingProof;
}

void Mempool::submit(wire::Transaction tx) {
    pending_.push_back(std::move(tx));
}

bool Mempool::submit_with_witness(wire::Transaction tx, std::span<const std::uint8_t> witness,
                                  prover::WitnessBundle bundle) {
    if (!prover::witness_matches_tx(witness, tx)) {
        ++rejected_witness_invalid_;
        return false;
    }
    Hash32 tx_hash = sha256::digest(tx.payload);
    witness_store_[tx_hash] = std::move(bundle);
    pending_.push_back(std::move(tx));
    return true;
}

std::vector<wire::Transaction> Mempool::select(std::size_t max) {
    std::vector<wire::Transaction> out;
    std::size_t n = std::min(max, pending_.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(std::move(pending_.front()));
        pending_.pop_front();
    }
    return out;
}

void Mempool::requeue(std::vector<wire::Transaction> txs) {
    for (auto& tx : txs) {
        pending_.push_back(std::move(tx));
    }
}

const prover::WitnessBundle* Mempool::witness_bundle(const Hash32& tx_hash) const {
    auto it = witness_store_.find(tx_hash);
    return it == witness_store_.end() ? nullptr : &it->second;
}

std::map<Hash32, prover::WitnessBundle> Mempool::take_bundles(
    const std::vector<Hash32>& tx_hashes) {
    std::map<Hash32, prover::WitnessBundle> out;
    for (const auto& h : tx_hashes) {
        auto it = witness_store_.find(h);
        if (it != witness_store_.end()) {
            out.emplace(h, std::move(it->second));
            witness_store_.erase(it);
        }
    }
    return out;
}

void Mempool::drop_bundle(const Hash32& tx_hash) {
    witness_store_.erase(tx_hash);
}

SlotResult process_slot(const LeaderContext& ctx, Mempool& mempool,
                        executor::AccountState& state, const PipelineConfig& cfg,
                        prover::ProverService* prover) {
    SlotResult result;
    const std::uint64_t t_start = now_us();

    std::vector<wire::Transaction> selected = mempool.select(cfg.max_txs_per_block);
    result.selected_count = selected.size();

    // Phase 1a: data-parallel light checks, order-preserving.
    const std::uint64_t t_attest = now_us();
    std::vector<LightCheck> checks(selected.size());
    std::vector<LightCheckCounters> chunk_counters(selected.size());
    ThreadPool::global().parallel_for(selected.size(), [&](std::size_t i) {
        checks[i] = attest_check_light(selected[i], mempool.registry(), ctx.slot, cfg,
                                       &chunk_counters[i]);
    });
    std::vector<wire::Transaction> accepted;
    accepted.reserve(selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i) {
        result.counters += chunk_counters[i];
        if (checks[i] == LightCheck::AcceptPendingProof) {
            accepted.push_back(std::move(selected[i]));
        } else {
            result.rejected.emplace_back(std::move(selected[i]), checks[i]);
        }
    }

    // Phase 1b: conflict-aware execution.
    const std::uint64_t t_exec = now_us();
    executor::DependencyGraph graph = executor::build_dependency_graph(accepted);
    result.deltas = executor::execute_batch(state, accepted, graph, cfg.parallelism);

    const std::uint64_t t_root = now_us();
    Hash32 new_state_root = executor::state_root(state);

    const std::uint64_t t_build = now_us();
    wire::Block block;
    block.header.slot_number = ctx.slot;
    block.header.parent_hash = ctx.parent_hash;
    block.header.state_root = new_state_root;
    block.header.poh_hash = ctx.poh_hash;
    block.header.leader_id_com = ctx.leader_id_com;
    block.header.timestamp_ms = ctx.timestamp_ms;
    block.transactions = std::move(accepted);
    block.header.tx_count = static_cast<std::uint32_t>(block.transactions.size());
    block.header.tx_merkle_root = wire::tx_merkle_root(block.transactions);
    block.header.attest_merkle_root = wire::attest_merkle_root(block.transactions);

    const std::uint64_t t_end = now_us();
    result.timings.attest_us = t_exec - t_attest;
    result.timings.execute_us = t_root - t_exec;
    result.timings.state_root_us = t_build - t_root;
    result.timings.build_us = t_end - t_build;
    result.timings.total_us = t_end - t_start;

    if (prover) {
        prover->enqueue(block);
    }
    result.block = std::move(block);
    return result;
}

ReplicaCheck replica_verify_block(const wire::Block& block, const IdentityRegistry& registry,
                                  const executor::AccountState& pre_state,
                                  const PipelineConfig& cfg,
                                  executor::AccountState* post_state) {
    if (block.header.tx_count != block.transactions.size()) {
        return ReplicaCheck::RootMismatch;
    }
    if (wire::tx_merkle_root(block.transactions) != block.header.tx_merkle_root ||
        wire::attest_merkle_root(block.transactions) != block.header.attest_merkle_root) {
        return ReplicaCheck::RootMismatch;
    }

    std::vector<LightCheck> checks(block.transactions.size());
    ThreadPool::global().parallel_for(block.transactions.size(), [&](std::size_t i) {
        checks[i] = attest_check_light(block.transactions[i], registry,
                                       block.header.slot_number, cfg, nullptr);
    });
    for (LightCheck c : checks) {
        if (c != LightCheck::AcceptPendingProof) return ReplicaCheck::AttestFailure;
    }

    executor::AccountState replay = pre_state;
    executor::DependencyGraph graph = executor::build_dependency_graph(block.transactions);
    executor::execute_batch(replay, block.transactions, graph, cfg.parallelism);
    if (executor::state_root(replay) != block.header.state_root) {
        return ReplicaCheck::StateRootMismatch;
    }
    if (post_state) *post_state = std::move(replay);
    return ReplicaCheck::Vote;
}

const char* to_string(LightCheck c) {
    switch (c) {
        case LightCheck::AcceptPendingProof: return "AcceptPendingProof";
        case LightCheck::PayloadBinding: return "PayloadBinding";
        case LightCheck::UnknownIdentity: return "UnknownIdentity";
        case LightCheck::StaleDomain: return "StaleDomain";
    }
    return "?";
}

const char* to_string(ReplicaCheck c) {
    switch (c) {
        case ReplicaCheck::Vote: return "Vote";
        case ReplicaCheck::RootMismatch: return "RootMismatch";
        case ReplicaCheck::AttestFailure: return "AttestFailure";
        case ReplicaCheck::StateRootMismatch: return "StateRootMismatch";
    }
    return "?";
}

}  // namespace ace::pipeline
