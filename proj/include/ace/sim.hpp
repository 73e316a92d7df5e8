#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ace/bytes.hpp"
#include "ace/config.hpp"
#include "ace/finality.hpp"
#include "ace/pipeline.hpp"
#include "ace/poh.hpp"

namespace ace::sim {

enum class Scenario {
    Normal,
    BuilderWithholdsProof,
    BackupProves,
    WitnessShortfallRollback,
    InvalidFcSlash,
    ForgedAttestationFlood,
};

std::optional<Scenario> parse_scenario(std::string_view name);
const char* to_string(Scenario s);

enum class Channel : std::uint8_t { Block = 0, Vote = 1, Fc = 2, Witness = 3 };

struct NetworkParams {
    std::uint64_t base_latency_us = 0;
    std::uint64_t jitter_us = 0;
    double drop_probability = 0.0;
};

// Injected stage costs on the simulated clock. Defaults follow the pipeline's
// published stage budget: leader seals at +300 ms, 50 ms publish legs, 15 ms
// per 128-wide proof batch, 45 ms aggregation, 0.5 ms certificate check.
struct CostModel {
    std::uint64_t block_seal_offset_us = 300000;
    std::uint64_t block_publish_us = 50000;
    std::uint64_t fc_publish_us = 50000;
    std::uint64_t attest_check_us_per_tx = 3;
    std::uint64_t execute_us_per_tx = 30;
    std::uint64_t proof_batch_us = 15000;
    unsigned proof_parallelism = 128;
    std::uint64_t aggregation_us = 45000;
    std::uint64_t fc_verify_us = 500;
    std::uint64_t vote_bytes = 112;

    std::uint64_t proving_us(std::size_t n_txs) const {
        std::uint64_t batches = (n_txs + proof_parallelism - 1) / proof_parallelism;
        return batches * proof_batch_us;
    }
};

enum class GossipSchedule { SameSlot, Spread };

struct SimConfig {
    std::uint64_t seed = 1;
    unsigned n_validators = 4;
    unsigned n_slots = 10;  // slots that produce blocks; timers may run longer
    std::size_t txs_per_slot = 2000;
    std::uint16_t chain_id = 1;
    std::uint32_t ticks_per_slot = 64;
    pipeline::PipelineConfig pipe;
    finality::FinalityConfig fin;
    NetworkParams net;
    CostModel cost;
    GossipSchedule gossip_schedule = GossipSchedule::SameSlot;
    unsigned gossip_spread_slots = 2;
    // Number of validators receiving witness bundles; 0 means all.
    unsigned witness_deliver_to = 0;
    std::uint64_t witness_bundle_bytes = 400;
    unsigned forged_pct = 0;  // percentage of forged submissions (flood)
    bool builder_withholds_fc = false;
    bool builder_sends_invalid_fc = false;

    std::uint64_t slot_us() const { return fin.slot_duration_ms * 1000; }

    void apply_overrides(const config::KvMap& kv);
};

// Scenario presets; all deterministic with zero network latency by default.
SimConfig config_for_scenario(Scenario s, const config::KvMap* overrides = nullptr);

struct ValidatorSpec {
    Hash32 id_com{};
    std::uint64_t stake = 0;
};

// Stake-weighted deterministic election: SHA-256(poh_hash || epoch_seed)
// reduced mod total stake picks the validator whose cumulative interval
// contains the draw. `validators` must be sorted by id_com ascending.
std::size_t elect_leader(const Hash32& poh_hash, const Hash32& epoch_seed,
                         std::span<const ValidatorSpec> validators);

struct BlockRecord {
    std::uint64_t slot = 0;
    unsigned leader = 0;
    std::uint32_t tx_count = 0;
    std::uint64_t publish_us = 0;       // header timestamp
    std::uint64_t soft_us = 0;          // node-0 clock; 0 = never
    std::uint64_t hard_us = 0;
    std::uint64_t rolled_back_us = 0;
    finality::State final_state = finality::State::Pending;
    bool slashed_builder = false;
    bool backup_path = false;
    bool entered_backup_wait = false;
    bool fork_detected = false;
    bool witness_available = false;  // quorum predicate at backup-window start
    bool requeued = false;
    std::uint64_t fc_verify_cost_units = 0;  // node-0 charge per verification

    std::uint64_t hard_after_slot_start_us(std::uint64_t slot_us) const {
        return hard_us == 0 ? 0 : hard_us - slot * slot_us;
    }
    std::uint64_t hard_after_publish_us() const { return hard_us == 0 ? 0 : hard_us - publish_us; }
    std::uint64_t rolled_back_after_publish_us() const {
        return rolled_back_us == 0 ? 0 : rolled_back_us - publish_us;
    }
};

struct SimReport {
    std::string scenario;
    std::uint64_t seed = 0;
    unsigned n_validators = 0;
    unsigned n_slots = 0;
    std::size_t txs_per_slot = 0;
    std::vector<BlockRecord> blocks;
    std::array<std::uint64_t, 4> channel_bytes{};  // indexed by Channel
    std::uint64_t rejected_payload_binding = 0;
    std::uint64_t rejected_unknown_identity = 0;
    std::uint64_t rejected_stale_domain = 0;
    std::uint64_t rejected_witness_invalid = 0;
    std::uint64_t forged_submitted = 0;
    std::uint64_t requeued_txs = 0;
    std::uint64_t slash_events = 0;
    bool vote_complexity_ok = true;
    std::vector<std::string> witness_observers;  // validators that saw plaintext
    std::vector<std::string> audit_lines;
    std::vector<std::string> assertion_failures;

    bool ok() const { return assertion_failures.empty(); }
    std::string render() const;
    std::string render_audit() const;
};

SimReport run_scenario(const SimConfig& cfg, Scenario scenario);

}  // namespace ace::sim
