#include <doctest.h>

#include <map>

#include "ace/poh.hpp"
#include "ace/sha256.hpp"
#include "ace/sim.hpp"

using namespace ace;
using namespace ace::sim;

TEST_CASE("poh chain: zero ticks, replay verification, tamper detection") {
    Hash32 seed;
    seed.fill(0xab);
    PohChain chain = poh_genesis(seed, 64);

    PohChain same = chain;
    poh_advance(same, 0);
    CHECK(same.current == chain.current);

    PohChain advanced = chain;
    poh_advance(advanced, 1000);
    CHECK(poh_verify(seed, advanced.current, 1000));
    CHECK(!poh_verify(seed, advanced.current, 999));

    Hash32 tampered = advanced.current;
    tampered[4] ^= 1;
    CHECK(!poh_verify(seed, tampered, 1000));
}

TEST_CASE("leader election: degenerate sets") {
    Hash32 poh;
    poh.fill(1);
    Hash32 seed;
    seed.fill(2);

    ValidatorSpec only{Hash32{}, 100};
    std::vector<ValidatorSpec> one = {only};
    CHECK(elect_leader(poh, seed, one) == 0);

    std::vector<ValidatorSpec> empty;
    CHECK_THROWS(elect_leader(poh, seed, empty));

    std::vector<ValidatorSpec> zero = {{Hash32{}, 0}};
    CHECK_THROWS(elect_leader(poh, seed, zero));
}

TEST_CASE("leader election: stake-weighted frequencies within 3 percent") {
    std::vector<ValidatorSpec> validators(2);
    validators[0].id_com.fill(0x01);
    validators[0].stake = 75;
    validators[1].id_com.fill(0x02);
    validators[1].stake = 25;

    Hash32 seed = sha256::digest(to_bytes("election-seed"));
    std::map<std::size_t, std::uint64_t> counts;
    Hash32 draw;
    draw.fill(0);
    for (int i = 0; i < 10000; ++i) {
        draw = sha256::digest(draw);  // seeded hash stream
        counts[elect_leader(draw, seed, validators)]++;
    }
    double f0 = counts[0] / 10000.0;
    CHECK(f0 > 0.72);
    CHECK(f0 < 0.78);
}

TEST_CASE("leader election is deterministic across calls") {
    std::vector<ValidatorSpec> validators(4);
    for (int i = 0; i < 4; ++i) {
        validators[i].id_com.fill(static_cast<std::uint8_t>(i + 1));
        validators[i].stake = 100 + 13 * i;
    }
    Hash32 poh = sha256::digest(to_bytes("slot-poh"));
    Hash32 seed = sha256::digest(to_bytes("epoch"));
    std::size_t first = elect_leader(poh, seed, validators);
    for (int i = 0; i < 10; ++i) {
        CHECK(elect_leader(poh, seed, validators) == first);
    }
}

namespace {

SimConfig quick_normal() {
    SimConfig cfg = config_for_scenario(Scenario::Normal, nullptr);
    cfg.n_slots = 3;
    cfg.txs_per_slot = 64;
    return cfg;
}

}  // namespace

TEST_CASE("normal scenario reaches hard finality on every block") {
    SimConfig cfg = quick_normal();
    SimReport report = run_scenario(cfg, Scenario::Normal);
    CHECK(report.ok());
    REQUIRE(report.blocks.size() == 3);
    for (const auto& b : report.blocks) {
        CHECK(b.final_state == finality::State::Hard);
        CHECK(b.soft_us > 0);
        CHECK(b.hard_us > b.soft_us);
        CHECK(!b.slashed_builder);
        CHECK(b.fc_verify_cost_units == 1);
    }
    CHECK(report.vote_complexity_ok);
}

TEST_CASE("simulation is deterministic for a fixed seed") {
    SimConfig cfg = quick_normal();
    SimReport a = run_scenario(cfg, Scenario::Normal);
    SimReport b = run_scenario(cfg, Scenario::Normal);
    CHECK(a.render() == b.render());
    CHECK(a.render_audit() == b.render_audit());

    cfg.seed = 2;
    SimReport c = run_scenario(cfg, Scenario::Normal);
    CHECK(a.render() != c.render());
}

TEST_CASE("builder withholding: backup path completes within the window") {
    SimConfig cfg = config_for_scenario(Scenario::BuilderWithholdsProof, nullptr);
    cfg.txs_per_slot = 64;
    SimReport report = run_scenario(cfg, Scenario::BuilderWithholdsProof);
    CHECK(report.ok());
    REQUIRE(report.blocks.size() == 1);
    const auto& b = report.blocks[0];
    CHECK(b.final_state == finality::State::Hard);
    CHECK(b.backup_path);
    CHECK(b.slashed_builder);
    CHECK(b.hard_after_publish_us() <= cfg.fin.total_window_us());
    CHECK(b.witness_available);
    CHECK(!report.witness_observers.empty());
}

TEST_CASE("witness shortfall rolls back exactly at the window boundary") {
    SimConfig cfg = config_for_scenario(Scenario::WitnessShortfallRollback, nullptr);
    cfg.txs_per_slot = 32;
    SimReport report = run_scenario(cfg, Scenario::WitnessShortfallRollback);
    CHECK(report.ok());
    REQUIRE(report.blocks.size() == 1);
    const auto& b = report.blocks[0];
    CHECK(b.final_state == finality::State::RolledBack);
    CHECK(b.rolled_back_after_publish_us() == cfg.fin.total_window_us());
    CHECK(!b.witness_available);
    CHECK(b.requeued);
    CHECK(report.requeued_txs == 32);
}

TEST_CASE("invalid fc: rollback plus slash") {
    SimConfig cfg = config_for_scenario(Scenario::InvalidFcSlash, nullptr);
    cfg.txs_per_slot = 32;
    SimReport report = run_scenario(cfg, Scenario::InvalidFcSlash);
    CHECK(report.ok());
    REQUIRE(report.blocks.size() == 1);
    const auto& b = report.blocks[0];
    CHECK(b.final_state == finality::State::RolledBack);
    CHECK(b.slashed_builder);
    CHECK(b.requeued);
    CHECK(report.slash_events >= 1);
}

TEST_CASE("forged flood: forgeries never reach a block") {
    SimConfig cfg = config_for_scenario(Scenario::ForgedAttestationFlood, nullptr);
    cfg.txs_per_slot = 200;
    SimReport report = run_scenario(cfg, Scenario::ForgedAttestationFlood);
    CHECK(report.ok());
    CHECK(report.forged_submitted > 0);
    // all four forgery classes appear and are filtered
    CHECK(report.rejected_payload_binding > 0);
    CHECK(report.rejected_unknown_identity > 0);
    CHECK(report.rejected_stale_domain > 0);
    CHECK(report.rejected_witness_invalid > 0);
    for (const auto& b : report.blocks) {
        CHECK(b.final_state == finality::State::Hard);
    }
}

TEST_CASE("witness gossip channel separation") {
    SimConfig same_slot = config_for_scenario(Scenario::Normal, nullptr);
    same_slot.n_slots = 2;
    same_slot.txs_per_slot = 50;
    SimReport with_gossip = run_scenario(same_slot, Scenario::Normal);

    SimConfig spread = same_slot;
    spread.gossip_schedule = GossipSchedule::Spread;
    SimReport spread_report = run_scenario(spread, Scenario::Normal);

    // block-channel accounting is identical regardless of the gossip schedule
    CHECK(with_gossip.channel_bytes[0] == spread_report.channel_bytes[0]);
    CHECK(with_gossip.channel_bytes[3] == spread_report.channel_bytes[3]);

    // combined per-tx footprint: 244 B block share + 400 B bundle = 644 B
    std::uint64_t total_txs = 2 * 50;
    std::uint64_t block_bytes = with_gossip.channel_bytes[0] - 2 * 256;  // headers excluded
    std::uint64_t witness_bytes = with_gossip.channel_bytes[3];
    CHECK(block_bytes / total_txs == 244);
    CHECK(witness_bytes / total_txs == 400);
    CHECK(block_bytes / total_txs + witness_bytes / total_txs == 644);
}

TEST_CASE("network latency shifts delivery by exactly the base latency") {
    SimConfig cfg = quick_normal();
    cfg.n_slots = 1;
    SimReport zero = run_scenario(cfg, Scenario::Normal);
    REQUIRE(zero.blocks.size() == 1);
    // node 0 is a replica for this seed; every leg to it crosses one link
    REQUIRE(zero.blocks[0].leader != 0);

    cfg.net.base_latency_us = 10000;
    SimReport shifted = run_scenario(cfg, Scenario::Normal);
    REQUIRE(shifted.blocks.size() == 1);
    CHECK(shifted.blocks[0].hard_us == zero.blocks[0].hard_us + 10000);
}

TEST_CASE("scenario parser covers all names and rejects junk") {
    CHECK(parse_scenario("normal") == Scenario::Normal);
    CHECK(parse_scenario("builder-withholds-proof") == Scenario::BuilderWithholdsProof);
    CHECK(parse_scenario("backup-proves") == Scenario::BackupProves);
    CHECK(parse_scenario("witness-shortfall-rollback") == Scenario::WitnessShortfallRollback);
    CHECK(parse_scenario("invalid-fc-slash") == Scenario::InvalidFcSlash);
    CHECK(parse_scenario("forged-attestation-flood") == Scenario::ForgedAttestationFlood);
    CHECK(!parse_scenario("bogus").has_value());
}
