#include "ace/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <variant>

#include "ace/hkdf.hpp"
#include "ace/models.hpp"
#include "ace/prover.hpp"
#include "ace/sha256.hpp"

namespace ace::sim {

namespace {

inline std::span<const std::uint8_t> sv_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string fmt_ms(std::uint64_t us) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%llu.%03llu", static_cast<unsigned long long>(us / 1000),
                  static_cast<unsigned long long>(us % 1000));
    return buf;
}

// Deterministic uniform draw; modulo bias is irrelevant here.
std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

}  // namespace

std::optional<Scenario> parse_scenario(std::string_view name) {
    if (name == "normal") return Scenario::Normal;
    if (name == "builder-withholds-proof") return Scenario::BuilderWithholdsProof;
    if (name == "backup-proves") return Scenario::BackupProves;
    if (name == "witness-shortfall-rollback") return Scenario::WitnessShortfallRollback;
    if (name == "invalid-fc-slash") return Scenario::InvalidFcSlash;
    if (name == "forged-attestation-flood") return Scenario::ForgedAttestationFlood;
    return std::nullopt;
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::Normal: return "normal";
        case Scenario::BuilderWithholdsProof: return "builder-withholds-proof";
        case Scenario::BackupProves: return "backup-proves";
        case Scenario::WitnessShortfallRollback: return "witness-shortfall-rollback";
        case Scenario::InvalidFcSlash: return "invalid-fc-slash";
        case Scenario::ForgedAttestationFlood: return "forged-attestation-flood";
    }
    return "?";
}

std::size_t elect_leader(const Hash32& poh_hash, const Hash32& epoch_seed,
                         std::span<const ValidatorSpec> validators) {
    if (validators.empty()) {
        throw std::invalid_argument("elect_leader: empty validator set");
    }
    std::uint64_t total = 0;
    for (const auto& v : validators) total += v.stake;
    if (total == 0) {
        throw std::invalid_argument("elect_leader: zero total stake");
    }
    Hash32 r = sha256::digest_parts({poh_hash, epoch_seed});
    // 256-bit value mod total, big-endian byte folding.
    std::uint64_t acc = 0;
    for (std::uint8_t b : r) {
        acc = ((static_cast<unsigned __int128>(acc) << 8) | b) % total;
    }
    std::uint64_t cumulative = 0;
    for (std::size_t i = 0; i < validators.size(); ++i) {
        cumulative += validators[i].stake;
        if (acc < cumulative) return i;
    }
    return validators.size() - 1;
}

void SimConfig::apply_overrides(const config::KvMap& kv) {
    auto u64 = [&](const char* key, auto& field) {
        if (auto v = config::get_u64(kv, key)) field = static_cast<std::decay_t<decltype(field)>>(*v);
    };
    u64("seed", seed);
    u64("n_validators", n_validators);
    u64("n_slots", n_slots);
    u64("txs_per_slot", txs_per_slot);
    u64("chain_id", chain_id);
    u64("ticks_per_slot", ticks_per_slot);
    u64("max_txs_per_block", pipe.max_txs_per_block);
    u64("domain_window_slots", pipe.domain_window_slots);
    if (auto v = config::get_u64(kv, "slot_duration_ms")) {
        pipe.slot_duration_ms = *v;
        fin.slot_duration_ms = *v;
    }
    u64("builder_window_slots", fin.builder_window_slots);
    u64("backup_window_slots", fin.backup_window_slots);
    u64("base_latency_us", net.base_latency_us);
    u64("jitter_us", net.jitter_us);
    if (auto v = config::get_double(kv, "drop_probability")) net.drop_probability = *v;
    u64("block_seal_offset_us", cost.block_seal_offset_us);
    u64("block_publish_us", cost.block_publish_us);
    u64("fc_publish_us", cost.fc_publish_us);
    u64("attest_check_us_per_tx", cost.attest_check_us_per_tx);
    u64("execute_us_per_tx", cost.execute_us_per_tx);
    u64("proof_batch_us", cost.proof_batch_us);
    u64("proof_parallelism", cost.proof_parallelism);
    u64("aggregation_us", cost.aggregation_us);
    u64("fc_verify_us", cost.fc_verify_us);
    u64("witness_bundle_bytes", witness_bundle_bytes);
    u64("witness_deliver_to", witness_deliver_to);
    u64("gossip_spread_slots", gossip_spread_slots);
    u64("forged_pct", forged_pct);
    if (auto v = config::get_string(kv, "gossip_schedule")) {
        if (*v == "spread") gossip_schedule = GossipSchedule::Spread;
        if (*v == "same-slot") gossip_schedule = GossipSchedule::SameSlot;
    }
}

SimConfig config_for_scenario(Scenario s, const config::KvMap* overrides) {
    SimConfig cfg;
    switch (s) {
        case Scenario::Normal:
            cfg.n_slots = 10;
            cfg.txs_per_slot = 2000;
            break;
        case Scenario::BuilderWithholdsProof:
            cfg.n_slots = 1;
            cfg.txs_per_slot = 256;
            cfg.builder_withholds_fc = true;
            break;
        case Scenario::BackupProves:
            cfg.n_slots = 1;
            cfg.txs_per_slot = 256;
            cfg.builder_withholds_fc = true;
            cfg.gossip_schedule = GossipSchedule::Spread;
            break;
        case Scenario::WitnessShortfallRollback: {
            cfg.n_slots = 1;
            cfg.txs_per_slot = 256;
            cfg.builder_withholds_fc = true;
            unsigned quorum = (2 * cfg.n_validators + 2) / 3;
            cfg.witness_deliver_to = quorum - 1;
            break;
        }
        case Scenario::InvalidFcSlash:
            cfg.n_slots = 1;
            cfg.txs_per_slot = 256;
            cfg.builder_sends_invalid_fc = true;
            break;
        case Scenario::ForgedAttestationFlood:
            cfg.n_slots = 3;
            cfg.txs_per_slot = 400;
            cfg.forged_pct = 25;
            break;
    }
    if (overrides) cfg.apply_overrides(*overrides);
    return cfg;
}

namespace {

// ---- event machinery --------------------------------------------------------

struct EvSlotStart {
    std::uint64_t slot;
};
struct EvBlockArrive {
    std::shared_ptr<const wire::Block> block;
};
struct EvVoteArrive {
    std::uint64_t slot;
    unsigned voter;
    Hash32 block_hash;
    Hash32 mac;
};
struct EvFcArrive {
    wire::FinalityCertificate fc;
    bool backup = false;
};
struct EvBundleArrive {
    std::uint64_t slot;
    std::vector<Hash32> tx_hashes;
};
struct EvShareArrive {
    std::uint64_t slot;
    unsigned contributor;
    std::set<Hash32> holdings;
};
struct EvTimer {
    std::uint64_t slot;
    bool backup;
};

using EventPayload = std::variant<EvSlotStart, EvBlockArrive, EvVoteArrive, EvFcArrive,
                                  EvBundleArrive, EvShareArrive, EvTimer>;

struct Event {
    std::uint64_t time_us;
    unsigned target;
    std::uint64_t seq;
    EventPayload payload;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time_us != b.time_us) return a.time_us > b.time_us;
        if (a.target != b.target) return a.target > b.target;
        return a.seq > b.seq;
    }
};

struct SlotView {
    std::shared_ptr<const wire::Block> block;
    Hash32 block_hash{};
    finality::SlotFinality fin;
    bool have_block = false;
    bool voted = false;
    bool fork = false;
    bool timers_scheduled = false;
    bool backup_started = false;
    std::optional<wire::FinalityCertificate> early_fc;
    std::set<Hash32> held_bundles;
    std::map<unsigned, std::set<Hash32>> contributions;  // aggregator side
    std::uint64_t fc_verify_cost_units = 0;
    bool requeued = false;
};

struct Node {
    unsigned index = 0;
    crypto::Rev rev = crypto::Rev::from_seed(0);
    Hash32 id_com{};
    std::uint64_t stake = 0;
    Hash32 vote_key{};
    pipeline::Mempool mempool;
    executor::AccountState state;
    std::map<std::uint64_t, SlotView> slots;
    std::map<std::uint64_t, unsigned> votes_sent;  // per slot
};

struct GeneratedTx {
    wire::Transaction tx;
    Bytes witness;
    prover::WitnessBundle bundle;
    bool forged = false;
};

struct SimRunner {
    const SimConfig& cfg;
    Scenario scenario;
    std::mt19937_64 rng;
    std::uint64_t seq = 0;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue;

    std::vector<Node> nodes;
    std::vector<ValidatorSpec> specs;  // sorted by id_com; index == node index
    std::uint64_t total_stake = 0;
    unsigned quorum = 0;

    std::vector<crypto::Rev> user_revs;
    std::vector<crypto::IdCommitment> user_idcoms;
    std::vector<wire::AccountId> account_pool;
    Hash32 epoch_seed{};
    PohChain poh;
    std::vector<Hash32> poh_at_slot;
    std::vector<unsigned> leaders;
    Hash32 parent_hash{};

    prover::WitnessScheme scheme;
    std::map<Hash32, prover::WitnessBundle> bundle_store;
    std::map<std::uint64_t, std::shared_ptr<const wire::Block>> block_store;
    std::set<Hash32> honest_tx_hashes;
    std::uint64_t tx_nonce = 0;

    SimReport report;
    std::map<std::uint64_t, unsigned> backup_leader;  // slot -> aggregator node

    explicit SimRunner(const SimConfig& c, Scenario s)
        : cfg(c),
          scenario(s),
          rng(c.seed),
          scheme(c.n_validators, sha256::digest_parts({sv_bytes("witness-master"),
                                                       seed_bytes(c.seed)})) {}

    static Hash32 seed_bytes(std::uint64_t seed) {
        Hash32 h{};
        put_u64be(h.data(), seed);
        return h;
    }

    void audit(const std::string& line) { report.audit_lines.push_back(line); }

    void push(std::uint64_t time_us, unsigned target, EventPayload payload) {
        queue.push({time_us, target, seq++, std::move(payload)});
    }

    std::uint64_t link_latency() {
        std::uint64_t l = cfg.net.base_latency_us;
        if (cfg.net.jitter_us > 0) l += rng_below(rng, cfg.net.jitter_us + 1);
        return l;
    }

    bool link_drops() {
        if (cfg.net.drop_probability <= 0) return false;
        return rng_below(rng, 1000000) <
               static_cast<std::uint64_t>(cfg.net.drop_probability * 1e6);
    }

    // ---- setup ----------------------------------------------------------------

    void setup() {
        struct Raw {
            crypto::Rev rev;
            Hash32 id_com;
        };
        std::vector<Raw> raw;
        crypto::Domain genesis_domain{cfg.chain_id, 0};
        for (unsigned i = 0; i < cfg.n_validators; ++i) {
            crypto::Rev rev = crypto::Rev::from_seed(0xACE0000 + i);
            Hash32 salt = sha256::digest_parts({sv_bytes("validator-salt"), seed_bytes(i)});
            auto idc = crypto::id_commitment(rev, salt, genesis_domain);
            raw.push_back({rev, idc.bytes});
        }
        std::sort(raw.begin(), raw.end(),
                  [](const Raw& a, const Raw& b) { return a.id_com < b.id_com; });

        nodes.resize(cfg.n_validators);
        for (unsigned i = 0; i < cfg.n_validators; ++i) {
            Node& n = nodes[i];
            n.index = i;
            n.rev = raw[i].rev;
            n.id_com = raw[i].id_com;
            n.stake = 100;
            auto keys = crypto::derive_validator_keys(n.rev, n.id_com, 0, genesis_domain);
            n.vote_key = keys.vote.bytes;
            specs.push_back({n.id_com, n.stake});
            total_stake += n.stake;
        }
        quorum = static_cast<unsigned>(cfg.fin.quorum_threshold(total_stake));

        for (unsigned u = 0; u < 8; ++u) {
            crypto::Rev rev = crypto::Rev::from_seed(0xFACE000 + u);
            Hash32 salt = sha256::digest_parts({sv_bytes("user-salt"), seed_bytes(u)});
            user_revs.push_back(rev);
            user_idcoms.push_back(crypto::id_commitment(rev, salt, genesis_domain));
        }

        for (auto& n : nodes) {
            for (const auto& idc : user_idcoms) n.mempool.registry().add(idc.bytes);
            for (const auto& v : specs) n.mempool.registry().add(v.id_com);
        }

        for (unsigned k = 0; k < 64; ++k) {
            Hash32 h = sha256::digest_parts({sv_bytes("account"), seed_bytes(k)});
            wire::AccountId id;
            std::copy(h.begin(), h.end(), id.begin());
            account_pool.push_back(id);
            executor::Account acct;
            acct.balance = 1000000000000ULL;
            for (auto& n : nodes) n.state.put(id, acct);
        }

        epoch_seed = sha256::digest_parts({sv_bytes("epoch"), seed_bytes(0)});
        Hash32 poh_seed = sha256::digest_parts({sv_bytes("poh-genesis"), seed_bytes(cfg.chain_id)});
        poh = poh_genesis(poh_seed, cfg.ticks_per_slot);

        for (std::uint64_t s = 0; s < cfg.n_slots; ++s) {
            poh_at_slot.push_back(poh.current);
            unsigned leader = static_cast<unsigned>(elect_leader(poh.current, epoch_seed, specs));
            leaders.push_back(leader);
            push(s * cfg.slot_us() + cfg.cost.block_seal_offset_us, leader, EvSlotStart{s});
            poh_advance(poh, cfg.ticks_per_slot);
        }
    }

    // ---- transaction generation ----------------------------------------------

    GeneratedTx generate_tx(std::uint64_t slot, bool forged, unsigned forge_type) {
        GeneratedTx g;
        unsigned u = static_cast<unsigned>(rng_below(rng, user_revs.size()));
        const auto& from = account_pool[rng_below(rng, account_pool.size())];
        const auto& to = account_pool[rng_below(rng, account_pool.size())];
        std::uint64_t amount = 1 + rng_below(rng, 1000);
        Hash32 recent = sha256::digest_parts({sv_bytes("blockhash"), seed_bytes(slot)});
        g.tx.payload = wire::make_transfer_payload(from, to, amount, tx_nonce++, recent);

        crypto::Domain domain{cfg.chain_id, slot};
        if (forged && forge_type == 2) {
            domain.slot = slot + cfg.pipe.domain_window_slots + 8;  // outside the window
        }
        crypto::Rev att_rev = user_revs[u];
        crypto::IdCommitment idc = user_idcoms[u];
        if (forged && forge_type == 1) {
            att_rev = crypto::Rev::from_seed(0xDEAD000 + tx_nonce);  // unregistered identity
            idc = crypto::id_commitment(att_rev, kZeroHash, domain);
        }
        g.tx.attestation = crypto::generate_attestation(att_rev, g.tx.payload, domain, idc);
        if (forged && forge_type == 0) {
            g.tx.payload[20] ^= 0x01;  // payload mutated after attestation
        }
        if (forged && forge_type == 3) {
            g.tx.attestation.credential[5] ^= 0x01;  // forged credential
        }
        g.forged = forged;

        Hash32 tx_hash = sha256::digest(g.tx.payload);
        crypto::DerivedKey attest_key = crypto::derive_attest_key(att_rev, g.tx.attestation.domain);
        g.witness = prover::build_witness(attest_key.bytes, tx_hash);
        g.bundle = scheme.encapsulate(tx_hash, g.witness);
        return g;
    }

    void inject_slot_txs(std::uint64_t slot, Node& leader) {
        for (std::size_t i = 0; i < cfg.txs_per_slot; ++i) {
            bool forged = cfg.forged_pct > 0 && rng_below(rng, 100) < cfg.forged_pct;
            unsigned forge_type = forged ? static_cast<unsigned>(rng_below(rng, 4)) : 0;
            GeneratedTx g = generate_tx(slot, forged, forge_type);
            if (forged) ++report.forged_submitted;
            // Mempool ingress validates the witness against the credential;
            // a forged credential dies here.
            if (!prover::witness_matches_tx(g.witness, g.tx)) {
                ++report.rejected_witness_invalid;
                continue;
            }
            Hash32 tx_hash = sha256::digest(g.tx.payload);
            if (!g.forged) honest_tx_hashes.insert(tx_hash);
            bundle_store[tx_hash] = std::move(g.bundle);
            leader.mempool.submit(std::move(g.tx));
        }
    }

    // ---- handlers -------------------------------------------------------------

    SlotView& view_of(Node& n, std::uint64_t slot) {
        auto it = n.slots.find(slot);
        if (it == n.slots.end()) {
            it = n.slots.emplace(slot, SlotView{}).first;
            it->second.fin = finality::SlotFinality(slot, cfg.fin, total_stake);
        }
        return it->second;
    }

    void on_slot_start(Node& leader, const EvSlotStart& ev, std::uint64_t now) {
        inject_slot_txs(ev.slot, leader);

        pipeline::LeaderContext ctx;
        ctx.slot = ev.slot;
        ctx.parent_hash = parent_hash;
        ctx.poh_hash = poh_at_slot[ev.slot];
        ctx.leader_id_com = leader.id_com;
        ctx.timestamp_ms = now / 1000;
        pipeline::SlotResult result =
            pipeline::process_slot(ctx, leader.mempool, leader.state, cfg.pipe, nullptr);

        for (const auto& [tx, reason] : result.rejected) {
            switch (reason) {
                case pipeline::LightCheck::PayloadBinding: ++report.rejected_payload_binding; break;
                case pipeline::LightCheck::UnknownIdentity: ++report.rejected_unknown_identity; break;
                case pipeline::LightCheck::StaleDomain: ++report.rejected_stale_domain; break;
                default: break;
            }
        }

        auto block = std::make_shared<const wire::Block>(std::move(result.block));
        block_store[ev.slot] = block;
        parent_hash = wire::block_hash(*block);
        report.channel_bytes[static_cast<int>(Channel::Block)] +=
            models::block_bytes_ace(block->transactions.size());

        // Self-delivery at seal; peers after the publish leg.
        push(now, leader.index, EvBlockArrive{block});
        for (auto& peer : nodes) {
            if (peer.index == leader.index) continue;
            if (link_drops()) continue;
            push(now + cfg.cost.block_publish_us + link_latency(), peer.index,
                 EvBlockArrive{block});
        }

        schedule_witness_gossip(ev.slot, *block, now);

        if (!cfg.builder_withholds_fc) {
            // Builder is co-located with the leader and proves from seal time.
            wire::FinalityCertificate fc =
                prover::build_finality_certificate(*block, prover::prove_block(*block));
            if (cfg.builder_sends_invalid_fc) {
                fc.proof[17] ^= 0x01;
            }
            std::uint64_t ready =
                now + cfg.cost.proving_us(block->transactions.size()) + cfg.cost.aggregation_us;
            report.channel_bytes[static_cast<int>(Channel::Fc)] +=
                wire::FinalityCertificate::kEncodedSize;
            push(ready, leader.index, EvFcArrive{fc, false});
            for (auto& peer : nodes) {
                if (peer.index == leader.index) continue;
                if (link_drops()) continue;
                push(ready + cfg.cost.fc_publish_us + link_latency(), peer.index,
                     EvFcArrive{fc, false});
            }
        }
    }

    void schedule_witness_gossip(std::uint64_t slot, const wire::Block& block, std::uint64_t now) {
        std::vector<Hash32> hashes;
        hashes.reserve(block.transactions.size());
        for (const auto& tx : block.transactions) {
            hashes.push_back(sha256::digest(tx.payload));
        }
        unsigned recipients = cfg.witness_deliver_to == 0
                                  ? cfg.n_validators
                                  : std::min(cfg.witness_deliver_to, cfg.n_validators);
        unsigned chunks = cfg.gossip_schedule == GossipSchedule::Spread
                              ? std::max(1u, cfg.gossip_spread_slots)
                              : 1u;
        std::size_t per_chunk = (hashes.size() + chunks - 1) / std::max<std::size_t>(chunks, 1);
        for (unsigned c = 0; c < chunks; ++c) {
            std::size_t begin = c * per_chunk;
            if (begin >= hashes.size()) break;
            std::size_t end = std::min(hashes.size(), begin + per_chunk);
            std::vector<Hash32> chunk(hashes.begin() + begin, hashes.begin() + end);
            std::uint64_t when = now + static_cast<std::uint64_t>(c) * cfg.slot_us();
            report.channel_bytes[static_cast<int>(Channel::Witness)] +=
                chunk.size() * cfg.witness_bundle_bytes;
            for (unsigned v = 0; v < recipients; ++v) {
                if (link_drops()) continue;
                push(when + link_latency(), v, EvBundleArrive{slot, chunk});
            }
        }
    }

    Hash32 vote_mac(const Node& voter, std::uint64_t slot, const Hash32& block_hash) const {
        std::uint8_t msg[32 + 8 + 4];
        std::memcpy(msg, block_hash.data(), 32);
        put_u64be(msg + 32, slot);
        put_u32be(msg + 40, voter.index);
        return crypto::hmac_sha256(voter.vote_key, {msg, sizeof(msg)});
    }

    void broadcast_vote(Node& voter, std::uint64_t slot, const Hash32& block_hash,
                        std::uint64_t when) {
        auto& sent = voter.votes_sent[slot];
        if (sent >= 1) return;  // one vote message per validator per slot
        ++sent;
        EvVoteArrive vote{slot, voter.index, block_hash, vote_mac(voter, slot, block_hash)};
        report.channel_bytes[static_cast<int>(Channel::Vote)] += cfg.cost.vote_bytes;
        push(when, voter.index, vote);
        for (auto& peer : nodes) {
            if (peer.index == voter.index) continue;
            if (link_drops()) continue;
            push(when + link_latency(), peer.index, vote);
        }
    }

    void schedule_slot_timers(Node& n, SlotView& view, std::uint64_t publish_us) {
        if (view.timers_scheduled) return;
        view.timers_scheduled = true;
        std::uint64_t slot = view.fin.slot();
        push(publish_us + cfg.fin.builder_window_us(), n.index, EvTimer{slot, false});
        push(publish_us + cfg.fin.total_window_us(), n.index, EvTimer{slot, true});
    }

    void on_block_arrive(Node& n, const EvBlockArrive& ev, std::uint64_t now) {
        const auto& block = *ev.block;
        std::uint64_t slot = block.header.slot_number;
        SlotView& view = view_of(n, slot);
        Hash32 hash = wire::block_hash(block);
        if (view.have_block) {
            if (view.block_hash != hash) {
                view.fork = true;
                audit("node=" + std::to_string(n.index) + " slot=" + std::to_string(slot) +
                      " event=fork_detected t_ms=" + fmt_ms(now));
            }
            return;  // first block received wins; forks only flagged
        }
        view.block = ev.block;
        view.block_hash = hash;
        view.have_block = true;
        schedule_slot_timers(n, view, block.header.timestamp_ms * 1000);

        bool is_leader = leaders.size() > slot && leaders[slot] == n.index;
        std::uint64_t vote_time = now;
        bool valid = true;
        if (!is_leader) {
            // Replica re-validation, charged on the simulated clock.
            vote_time += block.transactions.size() *
                         (cfg.cost.attest_check_us_per_tx + cfg.cost.execute_us_per_tx);
            executor::AccountState post;
            pipeline::ReplicaCheck check = pipeline::replica_verify_block(
                block, n.mempool.registry(), n.state, cfg.pipe, &post);
            valid = check == pipeline::ReplicaCheck::Vote;
            if (valid) {
                n.state = std::move(post);
            } else {
                audit("node=" + std::to_string(n.index) + " slot=" + std::to_string(slot) +
                      " event=replica_reject reason=" + pipeline::to_string(check) +
                      " t_ms=" + fmt_ms(now));
            }
        }
        if (valid && !view.voted) {
            view.voted = true;
            broadcast_vote(n, slot, hash, vote_time);
        }
    }

    void apply_fc_result(Node& n, SlotView& view, const finality::TransitionResult& r) {
        // Slash and requeue totals are reported from node 0's view; every node
        // performs the same local actions.
        if (r.slashed_now && n.index == 0) ++report.slash_events;
        if (r.requeue && !view.requeued) {
            view.requeued = true;
            if (view.block) {
                std::vector<wire::Transaction> txs(view.block->transactions.begin(),
                                                   view.block->transactions.end());
                n.mempool.requeue(std::move(txs));
                if (n.index == 0) {
                    report.requeued_txs += view.block->transactions.size();
                }
            }
        }
    }

    void process_fc(Node& n, SlotView& view, const wire::FinalityCertificate& fc,
                    std::uint64_t now, bool backup) {
        std::uint64_t cost_units = 0;
        prover::FcCheck check = prover::verify_finality_certificate(fc, *view.block, &cost_units);
        view.fc_verify_cost_units = cost_units;
        std::uint64_t decided = now + cfg.cost.fc_verify_us;
        bool valid = check == prover::FcCheck::Valid;
        if (!valid) {
            audit("node=" + std::to_string(n.index) + " slot=" + std::to_string(fc.slot_number) +
                  " event=fc_invalid reason=" + prover::to_string(check) +
                  " t_ms=" + fmt_ms(decided));
        }
        auto before = view.fin.state();
        auto r = view.fin.on_fc(valid, decided, &node_audit(n));
        if (r.transitioned && r.state == finality::State::Hard && backup) {
            backup_leader[fc.slot_number] = n.index;
        }
        apply_fc_result(n, view, r);
        if (!r.transitioned && before == finality::State::Pending && valid) {
            view.early_fc = fc;  // quorum not reached yet; replay on Soft
        }
    }

    std::vector<finality::AuditRecord> scratch_records;
    std::vector<finality::AuditRecord>& node_audit(Node& n) {
        scratch_records.clear();
        scratch_node = n.index;
        return scratch_records;
    }
    unsigned scratch_node = 0;

    void flush_audit() {
        for (const auto& rec : scratch_records) {
            audit("node=" + std::to_string(scratch_node) + " " + rec.line());
        }
        scratch_records.clear();
    }

    void on_vote_arrive(Node& n, const EvVoteArrive& ev, std::uint64_t now) {
        const Node& voter = nodes[ev.voter];
        std::uint8_t msg[32 + 8 + 4];
        std::memcpy(msg, ev.block_hash.data(), 32);
        put_u64be(msg + 32, ev.slot);
        put_u32be(msg + 40, ev.voter);
        Hash32 expected = crypto::hmac_sha256(voter.vote_key, {msg, sizeof(msg)});
        if (expected != ev.mac) {
            audit("node=" + std::to_string(n.index) + " slot=" + std::to_string(ev.slot) +
                  " event=vote_bad_mac t_ms=" + fmt_ms(now));
            return;
        }
        SlotView& view = view_of(n, ev.slot);
        auto r = view.fin.on_vote(voter.id_com, voter.stake, now, &node_audit(n));
        flush_audit();
        if (r.transitioned && r.state == finality::State::Soft && view.early_fc && view.block) {
            wire::FinalityCertificate fc = *view.early_fc;
            view.early_fc.reset();
            process_fc(n, view, fc, now, false);
            flush_audit();
        }
    }

    void on_fc_arrive(Node& n, const EvFcArrive& ev, std::uint64_t now) {
        std::uint64_t slot = ev.fc.slot_number;
        if (block_store.find(slot) == block_store.end()) {
            audit("node=" + std::to_string(n.index) + " slot=" + std::to_string(slot) +
                  " event=fc_ignored_untracked t_ms=" + fmt_ms(now));
            return;
        }
        SlotView& view = view_of(n, slot);
        if (!view.have_block) {
            view.early_fc = ev.fc;
            return;
        }
        process_fc(n, view, ev.fc, now, ev.backup);
        flush_audit();
    }

    void on_bundle_arrive(Node& n, const EvBundleArrive& ev, std::uint64_t /*now*/) {
        SlotView& view = view_of(n, ev.slot);
        for (const auto& h : ev.tx_hashes) view.held_bundles.insert(h);
    }

    void on_timer(Node& n, const EvTimer& ev, std::uint64_t now) {
        SlotView& view = view_of(n, ev.slot);
        if (!ev.backup) {
            auto r = view.fin.on_builder_timeout(now, &node_audit(n));
            flush_audit();
            if (r.slashed_now && n.index == 0) ++report.slash_events;
            if (r.transitioned && r.state == finality::State::BackupWait) {
                start_backup_contribution(n, view, ev.slot, now);
            }
        } else {
            auto r = view.fin.on_backup_timeout(now, &node_audit(n));
            flush_audit();
            apply_fc_result(n, view, r);
        }
    }

    void start_backup_contribution(Node& n, SlotView& view, std::uint64_t slot,
                                   std::uint64_t now) {
        if (view.held_bundles.empty()) return;
        // Contribution to the deterministic aggregator (lowest node index).
        unsigned aggregator = 0;
        report.channel_bytes[static_cast<int>(Channel::Witness)] +=
            32 * view.held_bundles.size();
        if (n.index == aggregator) {
            push(now, aggregator, EvShareArrive{slot, n.index, view.held_bundles});
        } else if (!link_drops()) {
            push(now + link_latency(), aggregator, EvShareArrive{slot, n.index,
                                                                 view.held_bundles});
        }
    }

    void on_share_arrive(Node& n, const EvShareArrive& ev, std::uint64_t now) {
        SlotView& view = view_of(n, ev.slot);
        view.contributions[ev.contributor] = ev.holdings;
        if (view.backup_started || !view.have_block) return;
        if (view.fin.state() != finality::State::BackupWait) return;

        const auto& block = *view.block;
        unsigned t = scheme.threshold();
        for (const auto& tx : block.transactions) {
            Hash32 h = sha256::digest(tx.payload);
            unsigned holders = 0;
            for (const auto& [v, held] : view.contributions) {
                if (held.count(h)) ++holders;
            }
            if (holders < t) return;  // wait for more contributions
        }

        view.backup_started = true;
        prover::BackupResult result =
            prover::backup_prove(block, bundle_store, view.contributions, scheme);
        if (std::holds_alternative<prover::BackupUnavailable>(result)) {
            const auto& u = std::get<prover::BackupUnavailable>(result);
            audit("node=" + std::to_string(n.index) + " slot=" + std::to_string(ev.slot) +
                  " event=backup_unavailable missing=" + std::to_string(u.missing_tx_hashes.size()) +
                  " t_ms=" + fmt_ms(now));
            return;
        }
        // The decrypting quorum observed the plaintext witnesses.
        std::string observers;
        for (const auto& [v, held] : view.contributions) {
            if (!observers.empty()) observers += ",";
            observers += std::to_string(v);
        }
        report.witness_observers.push_back("slot=" + std::to_string(ev.slot) +
                                           " validators=" + observers);

        const auto& fc = std::get<wire::FinalityCertificate>(result);
        std::uint64_t ready =
            now + cfg.cost.proving_us(block.transactions.size()) + cfg.cost.aggregation_us;
        report.channel_bytes[static_cast<int>(Channel::Fc)] +=
            wire::FinalityCertificate::kEncodedSize;
        push(ready, n.index, EvFcArrive{fc, true});
        for (auto& peer : nodes) {
            if (peer.index == n.index) continue;
            if (link_drops()) continue;
            push(ready + cfg.cost.fc_publish_us + link_latency(), peer.index,
                 EvFcArrive{fc, true});
        }
    }

    // ---- main loop and report --------------------------------------------------

    void run() {
        setup();
        while (!queue.empty()) {
            Event ev = queue.top();
            queue.pop();
            Node& n = nodes[ev.target];
            std::visit(
                [&](auto&& payload) {
                    using T = std::decay_t<decltype(payload)>;
                    if constexpr (std::is_same_v<T, EvSlotStart>) {
                        on_slot_start(n, payload, ev.time_us);
                    } else if constexpr (std::is_same_v<T, EvBlockArrive>) {
                        on_block_arrive(n, payload, ev.time_us);
                    } else if constexpr (std::is_same_v<T, EvVoteArrive>) {
                        on_vote_arrive(n, payload, ev.time_us);
                    } else if constexpr (std::is_same_v<T, EvFcArrive>) {
                        on_fc_arrive(n, payload, ev.time_us);
                    } else if constexpr (std::is_same_v<T, EvBundleArrive>) {
                        on_bundle_arrive(n, payload, ev.time_us);
                    } else if constexpr (std::is_same_v<T, EvShareArrive>) {
                        on_share_arrive(n, payload, ev.time_us);
                    } else if constexpr (std::is_same_v<T, EvTimer>) {
                        on_timer(n, payload, ev.time_us);
                    }
                },
                ev.payload);
        }
        finish();
    }

    void finish() {
        report.scenario = to_string(scenario);
        report.seed = cfg.seed;
        report.n_validators = cfg.n_validators;
        report.n_slots = cfg.n_slots;
        report.txs_per_slot = cfg.txs_per_slot;

        for (std::uint64_t s = 0; s < cfg.n_slots; ++s) {
            auto it = block_store.find(s);
            if (it == block_store.end()) continue;
            const auto& block = *it->second;
            BlockRecord rec;
            rec.slot = s;
            rec.leader = leaders[s];
            rec.tx_count = block.header.tx_count;
            rec.publish_us = block.header.timestamp_ms * 1000;

            Node& n0 = nodes[0];
            auto vit = n0.slots.find(s);
            if (vit != n0.slots.end()) {
                const SlotView& view = vit->second;
                rec.soft_us = view.fin.entered_at_us(finality::State::Soft);
                rec.hard_us = view.fin.entered_at_us(finality::State::Hard);
                rec.rolled_back_us = view.fin.entered_at_us(finality::State::RolledBack);
                rec.entered_backup_wait =
                    view.fin.entered_at_us(finality::State::BackupWait) != 0;
                rec.final_state = view.fin.state();
                rec.slashed_builder = view.fin.slashed_builder();
                rec.fork_detected = view.fork;
                rec.requeued = view.requeued;
                rec.fc_verify_cost_units = view.fc_verify_cost_units;
            }
            rec.backup_path = backup_leader.count(s) != 0;

            // Witness-availability predicate: every tx's bundle held by a
            // quorum of validators (receipt tracked per node).
            unsigned t = scheme.threshold();
            rec.witness_available = true;
            for (const auto& tx : block.transactions) {
                Hash32 h = sha256::digest(tx.payload);
                unsigned holders = 0;
                for (const auto& node : nodes) {
                    auto nv = node.slots.find(s);
                    if (nv != node.slots.end() && nv->second.held_bundles.count(h)) ++holders;
                }
                if (holders < t) {
                    rec.witness_available = false;
                    break;
                }
            }
            report.blocks.push_back(rec);
        }

        check_vote_complexity();
        check_cross_node_agreement();
        scenario_assertions();
    }

    void check_vote_complexity() {
        for (const auto& n : nodes) {
            for (const auto& [slot, count] : n.votes_sent) {
                if (count > 1) {
                    report.vote_complexity_ok = false;
                    report.assertion_failures.push_back(
                        "validator " + std::to_string(n.index) + " sent " +
                        std::to_string(count) + " votes in slot " + std::to_string(slot));
                }
            }
        }
    }

    void check_cross_node_agreement() {
        for (const auto& rec : report.blocks) {
            std::set<finality::State> states;
            for (auto& n : nodes) {
                auto it = n.slots.find(rec.slot);
                if (it != n.slots.end()) states.insert(it->second.fin.state());
            }
            if (states.size() > 1) {
                report.assertion_failures.push_back("nodes disagree on slot " +
                                                    std::to_string(rec.slot));
            }
        }
        // Safety: a node never holds two different Hard blocks for one slot.
        // Blocks are keyed by first receipt, so a disagreement would surface
        // as a fork flag on a Hard slot.
        for (auto& n : nodes) {
            for (const auto& [slot, view] : n.slots) {
                if (view.fin.state() == finality::State::Hard && view.fork) {
                    report.assertion_failures.push_back(
                        "node " + std::to_string(n.index) + " saw a fork at hard slot " +
                        std::to_string(slot));
                }
            }
        }
    }

    void fail_unless(bool cond, const std::string& msg) {
        if (!cond) report.assertion_failures.push_back(msg);
    }

    void scenario_assertions() {
        const std::uint64_t window_us = cfg.fin.total_window_us();
        switch (scenario) {
            case Scenario::Normal:
                fail_unless(report.blocks.size() == cfg.n_slots, "missing blocks");
                for (const auto& b : report.blocks) {
                    fail_unless(b.final_state == finality::State::Hard,
                                "slot " + std::to_string(b.slot) + " not hard");
                    fail_unless(!b.slashed_builder, "unexpected slash");
                    fail_unless(!b.backup_path, "unexpected backup path");
                    if (cfg.net.drop_probability == 0 && b.hard_us != 0) {
                        // liveness: hard within one slot of the earliest
                        // possible certificate arrival
                        std::uint64_t fc_earliest = b.publish_us +
                                                    cfg.cost.proving_us(b.tx_count) +
                                                    cfg.cost.aggregation_us;
                        fail_unless(b.hard_us <= fc_earliest + cfg.slot_us(),
                                    "hard finality lagged the certificate by over a slot");
                    }
                }
                fail_unless(report.slash_events == 0, "unexpected slash events");
                break;
            case Scenario::BuilderWithholdsProof:
            case Scenario::BackupProves:
                for (const auto& b : report.blocks) {
                    fail_unless(b.final_state == finality::State::Hard, "block not hard");
                    fail_unless(b.backup_path, "backup path not used");
                    fail_unless(b.slashed_builder, "builder not slashed");
                    fail_unless(b.hard_after_publish_us() <= window_us,
                                "hard finality after the backup window");
                    fail_unless(b.witness_available, "witness predicate false");
                }
                fail_unless(!report.witness_observers.empty(), "no witness observers recorded");
                break;
            case Scenario::WitnessShortfallRollback:
                for (const auto& b : report.blocks) {
                    fail_unless(b.final_state == finality::State::RolledBack,
                                "block not rolled back");
                    fail_unless(b.rolled_back_after_publish_us() == window_us,
                                "rollback not at the window boundary");
                    fail_unless(b.requeued, "transactions not requeued");
                    fail_unless(!b.witness_available, "witness predicate unexpectedly true");
                    fail_unless(b.slashed_builder, "builder not slashed");
                }
                break;
            case Scenario::InvalidFcSlash:
                for (const auto& b : report.blocks) {
                    fail_unless(b.final_state == finality::State::RolledBack,
                                "block not rolled back");
                    fail_unless(b.slashed_builder, "builder not slashed");
                    fail_unless(b.requeued, "transactions not requeued");
                }
                break;
            case Scenario::ForgedAttestationFlood:
                fail_unless(report.forged_submitted > 0, "no forged submissions generated");
                for (const auto& b : report.blocks) {
                    fail_unless(b.final_state == finality::State::Hard, "block not hard");
                }
                for (const auto& entry : block_store) {
                    for (const auto& tx : entry.second->transactions) {
                        Hash32 h = sha256::digest(tx.payload);
                        fail_unless(honest_tx_hashes.count(h) == 1,
                                    "forged transaction reached a block");
                    }
                }
                break;
        }
        // A block that enters the backup window with witness availability
        // satisfied must finish Hard, never RolledBack.
        for (const auto& b : report.blocks) {
            if (b.entered_backup_wait && b.witness_available) {
                fail_unless(b.final_state != finality::State::RolledBack,
                            "rollback despite witness availability");
            }
        }
    }
};

}  // namespace

SimReport run_scenario(const SimConfig& cfg, Scenario scenario) {
    SimRunner runner(cfg, scenario);
    runner.run();
    return std::move(runner.report);
}

std::string SimReport::render() const {
    std::string out;
    out += "# ace-sim report\n";
    out += "scenario=" + scenario + "\n";
    out += "seed=" + std::to_string(seed) + "\n";
    out += "validators=" + std::to_string(n_validators) + "\n";
    out += "slots=" + std::to_string(n_slots) + "\n";
    out += "txs_per_slot=" + std::to_string(txs_per_slot) + "\n";
    for (const auto& b : blocks) {
        char buf[512];
        std::snprintf(
            buf, sizeof(buf),
            "block slot=%llu leader=%u txs=%u publish_ms=%s soft_ms=%s hard_ms=%s "
            "rolled_back_ms=%s state=%s backup=%d slashed=%d fork=%d witness_avail=%d "
            "requeued=%d verify_cost_units=%llu\n",
            static_cast<unsigned long long>(b.slot), b.leader, b.tx_count,
            fmt_ms(b.publish_us).c_str(), fmt_ms(b.soft_us).c_str(), fmt_ms(b.hard_us).c_str(),
            fmt_ms(b.rolled_back_us).c_str(), finality::to_string(b.final_state),
            b.backup_path ? 1 : 0, b.slashed_builder ? 1 : 0, b.fork_detected ? 1 : 0,
            b.witness_available ? 1 : 0, b.requeued ? 1 : 0,
            static_cast<unsigned long long>(b.fc_verify_cost_units));
        out += buf;
    }
    out += "channel_bytes block=" + std::to_string(channel_bytes[0]) +
           " vote=" + std::to_string(channel_bytes[1]) + " fc=" + std::to_string(channel_bytes[2]) +
           " witness=" + std::to_string(channel_bytes[3]) + "\n";
    out += "rejected payload_binding=" + std::to_string(rejected_payload_binding) +
           " unknown_identity=" + std::to_string(rejected_unknown_identity) +
           " stale_domain=" + std::to_string(rejected_stale_domain) +
           " witness_invalid=" + std::to_string(rejected_witness_invalid) + "\n";
    out += "forged_submitted=" + std::to_string(forged_submitted) + "\n";
    out += "requeued_txs=" + std::to_string(requeued_txs) + "\n";
    out += "slash_events=" + std::to_string(slash_events) + "\n";
    out += "vote_complexity_ok=" + std::to_string(vote_complexity_ok ? 1 : 0) + "\n";
    std::size_t hard = 0, rolled = 0, backup = 0;
    for (const auto& b : blocks) {
        if (b.final_state == finality::State::Hard) ++hard;
        if (b.final_state == finality::State::RolledBack) ++rolled;
        if (b.backup_path) ++backup;
    }
    out += "summary blocks=" + std::to_string(blocks.size()) + " hard=" + std::to_string(hard) +
           " rolled_back=" + std::to_string(rolled) + " backup_path=" + std::to_string(backup) +
           "\n";
    for (const auto& w : witness_observers) {
        out += "witness_plaintext_observers " + w + "\n";
    }
    if (assertion_failures.empty()) {
        out += "assertions=PASS\n";
    } else {
        for (const auto& f : assertion_failures) {
            out += "assertion_failure=" + f + "\n";
        }
        out += "assertions=FAIL\n";
    }
    return out;
}

std::string SimReport::render_audit() const {
    std::string out;
    for (const auto& line : audit_lines) {
        out += line;
        out += "\n";
    }
    return out;
}

}  // namespace ace::sim
