// Acceptance suite: every release criterion with its pinned tolerance, one
// pass/fail line each. Exit code 0 only if all hard criteria hold.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ace/bench.hpp"
#include "ace/crypto.hpp"
#include "ace/executor.hpp"
#include "ace/finality.hpp"
#include "ace/models.hpp"
#include "ace/pipeline.hpp"
#include "ace/prover.hpp"
#include "ace/sha256.hpp"
#include "ace/sim.hpp"
#include "ace/wire.hpp"

using namespace ace;

namespace {

struct Criterion {
    int number;
    std::string name;
    bool soft = false;
    std::function<bool(std::string&)> run;
};

crypto::Rev g_rev = crypto::Rev::from_seed(20240801);
crypto::Domain g_domain{1, 40};
crypto::IdCommitment g_idcom = crypto::id_commitment(g_rev, kZeroHash, g_domain);

wire::Transaction canonical_tx(std::uint64_t nonce) {
    wire::AccountId a{}, b{};
    a.fill(1);
    b.fill(2);
    wire::Transaction tx;
    tx.payload = wire::make_transfer_payload(a, b, 10, nonce, kZeroHash);
    tx.attestation = crypto::generate_attestation(g_rev, tx.payload, g_domain, g_idcom);
    return tx;
}

wire::Block canonical_block(std::size_t n_txs) {
    wire::Block block;
    block.header.slot_number = g_domain.slot;
    block.transactions.reserve(n_txs);
    for (std::size_t i = 0; i < n_txs; ++i) {
        block.transactions.push_back(canonical_tx(i));
    }
    block.header.tx_count = static_cast<std::uint32_t>(n_txs);
    block.header.tx_merkle_root = wire::tx_merkle_root(block.transactions);
    block.header.attest_merkle_root = wire::attest_merkle_root(block.transactions);
    return block;
}

std::string read_file(const std::string& path, bool& ok) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ok = false;
        return {};
    }
    std::stringstream ss;
    ss << in.rdbuf();
    ok = true;
    return ss.str();
}

// --- criterion 1: wire exactness ---------------------------------------------

bool criterion_wire_exactness(std::string& detail) {
    bool ok = true;
    for (std::size_t n : {std::size_t{1}, std::size_t{2000}, std::size_t{100000}}) {
        wire::Block block = canonical_block(n);
        wire::FinalityCertificate fc =
            prover::build_finality_certificate(block, prover::MockProof{});
        ok &= fc.encode().size() == 328;
    }
    wire::BlockHeader header;
    ok &= header.encode().size() == 256;
    wire::Block empty;
    ok &= wire::encode_block(empty).size() == 256;
    detail = "fc=328 B for 1/2000/100000 txs, header region=256 B";
    return ok;
}

// --- criterion 2: block-size model --------------------------------------------

bool criterion_block_size(std::string& detail) {
    wire::Block block = canonical_block(2000);
    std::size_t actual = wire::encode_block(block).size();
    std::uint64_t model = models::block_bytes_ace(2000);
    bool ok = model == 488256;
    double ratio = static_cast<double>(actual) / static_cast<double>(model);
    ok &= ratio >= 0.9 && ratio <= 1.1;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "model=%llu B, encoded=%zu B (%+.1f%%)",
                  static_cast<unsigned long long>(model), actual, (ratio - 1.0) * 100.0);
    detail = buf;
    return ok;
}

// --- criterion 3: table reproduction ------------------------------------------

bool criterion_tables(std::string& detail) {
    bool ok = true;
    struct Pair {
        const char* golden;
        std::string rendered;
    };
    std::vector<Pair> pairs = {
        {"table5.csv", models::table5_csv()},
        {"table6.csv", models::table6_csv()},
        {"tps.csv", models::tps_csv()},
    };
    std::string mismatches;
    for (const auto& p : pairs) {
        bool readable = false;
        std::string golden = read_file(std::string(ACE_GOLDEN_DIR) + "/" + p.golden, readable);
        if (!readable || golden != p.rendered) {
            ok = false;
            mismatches += std::string(" ") + p.golden;
        }
    }
    detail = ok ? "table5/table6/tps byte-identical to goldens"
                : "mismatch:" + mismatches;
    return ok;
}

// --- criterion 4: finality timeline -------------------------------------------

bool criterion_timeline(std::string& detail) {
    bool ok = true;
    std::string note;

    {
        sim::SimConfig cfg = sim::config_for_scenario(sim::Scenario::Normal, nullptr);
        cfg.n_slots = 100;
        cfg.txs_per_slot = 2000;
        sim::SimReport report = sim::run_scenario(cfg, sim::Scenario::Normal);
        ok &= report.ok();
        std::size_t in_window = 0;
        for (const auto& b : report.blocks) {
            std::uint64_t after = b.hard_after_slot_start_us(cfg.slot_us());
            if (after >= 550000 && after <= 650000) ++in_window;
        }
        ok &= report.blocks.size() == 100;
        ok &= in_window >= 95;
        note += "normal " + std::to_string(in_window) + "/100 blocks hard in 600+-50 ms";
    }
    {
        sim::SimConfig cfg =
            sim::config_for_scenario(sim::Scenario::BuilderWithholdsProof, nullptr);
        sim::SimReport report = sim::run_scenario(cfg, sim::Scenario::BuilderWithholdsProof);
        ok &= report.ok();
        for (const auto& b : report.blocks) {
            ok &= b.final_state == finality::State::Hard;
            ok &= b.hard_after_publish_us() <= 2400000;
            ok &= b.slashed_builder;
        }
        note += "; backup hard<=2400 ms";
    }
    {
        sim::SimConfig cfg =
            sim::config_for_scenario(sim::Scenario::WitnessShortfallRollback, nullptr);
        sim::SimReport report = sim::run_scenario(cfg, sim::Scenario::WitnessShortfallRollback);
        ok &= report.ok();
        for (const auto& b : report.blocks) {
            ok &= b.final_state == finality::State::RolledBack;
            ok &= b.rolled_back_after_publish_us() == 2400000;
        }
        note += "; shortfall rollback at exactly 2400 ms";
    }
    detail = note;
    return ok;
}

// --- criterion 5: finality safety ---------------------------------------------

bool criterion_safety(std::string& detail) {
    enum Ev { V0, V1, V2, V3, FcOk, FcBad, TimerK, TimerKK, kEvCount };
    std::uint64_t sequences = 0;
    for (int len = 0; len <= 6; ++len) {
        std::uint64_t combos = 1;
        for (int i = 0; i < len; ++i) combos *= kEvCount;
        for (std::uint64_t code = 0; code < combos; ++code) {
            finality::SlotFinality f(1, finality::FinalityConfig{}, 400);
            bool was_hard = false;
            bool saw_valid = false;
            std::uint64_t c = code;
            for (int step = 0; step < len; ++step) {
                Ev ev = static_cast<Ev>(c % kEvCount);
                c /= kEvCount;
                std::uint64_t now = 100 * (step + 1);
                Hash32 voter{};
                switch (ev) {
                    case V0:
                    case V1:
                    case V2:
                    case V3:
                        voter.fill(static_cast<std::uint8_t>(ev + 1));
                        f.on_vote(voter, 100, now, nullptr);
                        break;
                    case FcOk:
                        saw_valid = true;
                        f.on_fc(true, now, nullptr);
                        break;
                    case FcBad:
                        f.on_fc(false, now, nullptr);
                        break;
                    case TimerK:
                        f.on_builder_timeout(now, nullptr);
                        break;
                    case TimerKK:
                        f.on_backup_timeout(now, nullptr);
                        break;
                    default:
                        break;
                }
                if (was_hard && f.state() != finality::State::Hard) {
                    detail = "state left Hard";
                    return false;
                }
                if (f.state() == finality::State::Hard) {
                    was_hard = true;
                    if (!saw_valid) {
                        detail = "Hard reached without a valid FC";
                        return false;
                    }
                }
            }
            ++sequences;
        }
    }
    detail = std::to_string(sequences) + " event sequences, Hard terminal, Hard requires valid FC";
    return true;
}

// --- criterion 6: forgery suite ------------------------------------------------

bool criterion_forgery(std::string& detail) {
    std::mt19937_64 rng(0xF0126);
    pipeline::IdentityRegistry registry;
    registry.add(g_idcom.bytes);
    pipeline::PipelineConfig cfg;

    std::size_t accepted_full = 0;
    std::size_t light_accepts_passing_full = 0;
    const int kTrials = 10000;
    for (int i = 0; i < kTrials; ++i) {
        wire::Transaction tx = canonical_tx(1000000 + i);
        switch (i % 3) {
            case 0:  // random credential
                for (auto& b : tx.attestation.credential) {
                    b = static_cast<std::uint8_t>(rng());
                }
                break;
            case 1: {  // credential replayed across domains
                crypto::Domain other = tx.attestation.domain;
                other.slot += 1 + rng() % 2;
                tx.attestation.domain = other;
                break;
            }
            case 2:  // payload mutated after attestation
                tx.payload[rng() % tx.payload.size()] ^=
                    static_cast<std::uint8_t>(1 + rng() % 255);
                break;
        }
        auto full = crypto::verify_attestation_full(tx.attestation, tx.payload, g_rev);
        if (full == crypto::AttestationCheck::Accept) {
            // a domain replay inside the freshness window may keep the light
            // check green; full verification must still catch it unless the
            // mutation happened to be a no-op (excluded by construction)
            ++accepted_full;
        }
        auto light = pipeline::attest_check_light(tx, registry, g_domain.slot, cfg);
        if (light == pipeline::LightCheck::AcceptPendingProof &&
            full == crypto::AttestationCheck::Accept) {
            ++light_accepts_passing_full;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d forgeries: full-verify accepts=%zu, light-accepts passing full=%zu",
                  kTrials, accepted_full, light_accepts_passing_full);
    detail = buf;
    return accepted_full == 0 && light_accepts_passing_full == 0;
}

// --- criterion 7: executor serializability -------------------------------------

bool criterion_serializability(std::string& detail) {
    std::mt19937_64 rng(0xE8EC);
    Hash32 id_a, id_b;
    id_a.fill(0x21);
    id_b.fill(0x22);
    Bytes tag_a = to_bytes("treasury:0");
    Bytes tag_b = to_bytes("payroll:0");

    auto transfer = [&](const wire::AccountId& from, const wire::AccountId& to,
                        std::uint64_t amount, std::uint64_t nonce) {
        wire::Transaction tx;
        tx.payload = wire::make_transfer_payload(from, to, amount, nonce, kZeroHash);
        return tx;
    };

    for (int round = 0; round < 500; ++round) {
        std::vector<wire::AccountId> ids;
        for (int k = 0; k < 10; ++k) {
            wire::AccountId id{};
            id.fill(static_cast<std::uint8_t>(k + 1));
            ids.push_back(id);
        }
        for (int k = 0; k < 3; ++k) {
            ids.push_back(executor::context_account_id(id_a, tag_a, k));
            ids.push_back(executor::context_account_id(id_b, tag_b, k));
        }
        executor::AccountState base;
        for (const auto& id : ids) {
            executor::Account acct;
            acct.balance = rng() % 2000;
            base.put(id, acct);
        }
        std::size_t n = 1 + rng() % 64;
        std::vector<wire::Transaction> txs;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t from = rng() % ids.size();
            std::size_t to = rng() % ids.size();
            wire::Transaction tx = transfer(ids[from], ids[to], rng() % 300, i);
            if (from >= 10 && to >= 10 && ((from - 10) % 2 == (to - 10) % 2)) {
                bool is_a = (from - 10) % 2 == 0;
                tx.context_tag = is_a ? tag_a : tag_b;
                tx.attestation.id_com = is_a ? id_a : id_b;
            }
            txs.push_back(std::move(tx));
        }

        executor::AccountState oracle = base;
        executor::execute_sequential(oracle, txs);
        Hash32 oracle_root = executor::state_root(oracle);

        executor::AccountState parallel = base;
        auto graph = executor::build_dependency_graph(txs);
        executor::execute_batch(parallel, txs, graph);
        if (executor::state_root(parallel) != oracle_root) {
            detail = "parallel/sequential divergence in round " + std::to_string(round);
            return false;
        }

        // constructed violation: a context transaction touching a global
        // account must never ride the fast path
        wire::Transaction violating =
            transfer(executor::context_account_id(id_a, tag_a, 0), ids[0], 1, 777);
        violating.context_tag = tag_a;
        violating.attestation.id_com = id_a;
        wire::Transaction confined =
            transfer(executor::context_account_id(id_b, tag_b, 0),
                     executor::context_account_id(id_b, tag_b, 1), 1, 778);
        confined.context_tag = tag_b;
        confined.attestation.id_com = id_b;
        std::vector<wire::Transaction> pair = {violating, confined};
        auto g2 = executor::build_dependency_graph(pair);
        if (g2.fast_path_taken(0, 1)) {
            detail = "fast path fired on a global-account violation";
            return false;
        }
    }
    detail = "500 randomized batches, parallel == sequential state root; fast path clean";
    return true;
}

// --- criterion 8: O(1) verification --------------------------------------------

bool criterion_o1_verification(std::string& detail) {
    bool ok = true;
    std::vector<std::size_t> cost_units;
    std::vector<std::size_t> fc_sizes;
    for (std::size_t n : {std::size_t{10}, std::size_t{1000}, std::size_t{100000}}) {
        wire::Block block = canonical_block(n);
        wire::FinalityCertificate fc =
            prover::build_finality_certificate(block, prover::prove_block(block));
        std::uint64_t units = 0;
        ok &= prover::verify_finality_certificate(fc, block, &units) == prover::FcCheck::Valid;
        cost_units.push_back(units);
        fc_sizes.push_back(fc.encode().size());
    }
    ok &= cost_units[0] == cost_units[1] && cost_units[1] == cost_units[2];
    ok &= fc_sizes[0] == fc_sizes[1] && fc_sizes[1] == fc_sizes[2] && fc_sizes[0] == 328;

    prover::MockProof seed = prover::prove_tx(canonical_tx(0));
    for (std::size_t n = 1; n <= 4096; ++n) {
        std::vector<prover::MockProof> proofs(n, seed);
        prover::AggregationStats stats;
        prover::aggregate_tree(proofs, &stats);
        std::size_t expect = 0;
        while ((std::size_t{1} << expect) < n) ++expect;
        if (stats.levels != expect) {
            detail = "level count mismatch at n=" + std::to_string(n);
            return false;
        }
    }
    detail = "verify cost-units and 328-B size identical for N=10/1000/100000; levels "
             "= ceil(log2 N) for N in 1..4096";
    return ok;
}

// --- criterion 9: benchmark sanity (soft) ---------------------------------------

bool criterion_bench(std::string& detail) {
    pipeline::IdentityRegistry registry;
    registry.add(g_idcom.bytes);
    pipeline::PipelineConfig cfg;

    std::vector<wire::Transaction> txs;
    for (int i = 0; i < 2000; ++i) txs.push_back(canonical_tx(i));

    auto t0 = std::chrono::steady_clock::now();
    for (const auto& tx : txs) {
        pipeline::attest_check_light(tx, registry, g_domain.slot, cfg);
    }
    auto t1 = std::chrono::steady_clock::now();
    double light_us_per_tx =
        std::chrono::duration<double, std::micro>(t1 - t0).count() / txs.size();

    pipeline::Mempool pool;
    pool.registry().add(g_idcom.bytes);
    for (const auto& tx : txs) pool.submit(tx);
    executor::AccountState state;
    wire::AccountId a{}, b{};
    a.fill(1);
    b.fill(2);
    executor::Account acct;
    acct.balance = 1000000000;
    state.put(a, acct);
    state.put(b, acct);
    pipeline::LeaderContext ctx;
    ctx.slot = g_domain.slot;
    auto t2 = std::chrono::steady_clock::now();
    auto result = pipeline::process_slot(ctx, pool, state, cfg, nullptr);
    prover::prove_block(result.block);
    auto t3 = std::chrono::steady_clock::now();
    double e2e_ms = std::chrono::duration<double, std::milli>(t3 - t2).count();

    char buf[200];
    bool within = light_us_per_tx < 5.0 && e2e_ms < 400.0;
    std::snprintf(buf, sizeof(buf),
                  "light check %.3f us/tx (budget 5 us), end-to-end %.1f ms @2000 txs "
                  "(budget 400 ms)%s",
                  light_us_per_tx, e2e_ms, within ? "" : " [WARN: budget exceeded on this host]");
    detail = buf;
    return within;
}

// --- criterion 10: determinism ---------------------------------------------------

bool criterion_determinism(std::string& detail) {
    bool ok = true;
    for (auto scenario : {sim::Scenario::Normal, sim::Scenario::BuilderWithholdsProof,
                          sim::Scenario::WitnessShortfallRollback,
                          sim::Scenario::ForgedAttestationFlood}) {
        sim::SimConfig cfg = sim::config_for_scenario(scenario, nullptr);
        if (scenario == sim::Scenario::Normal) {
            cfg.n_slots = 3;
            cfg.txs_per_slot = 128;
        }
        cfg.seed = 99;
        sim::SimReport a = sim::run_scenario(cfg, scenario);
        sim::SimReport b = sim::run_scenario(cfg, scenario);
        ok &= a.render() == b.render();
        ok &= a.render_audit() == b.render_audit();
    }
    detail = "reports byte-identical across reruns (4 scenarios, fixed seed)";
    return ok;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "wire exactness (FC 328 B, header 256 B)", false, criterion_wire_exactness},
        {2, "block-size model (488,256 B +-10%)", false, criterion_block_size},
        {3, "table reproduction (golden CSVs)", false, criterion_tables},
        {4, "finality timeline (600+-50 ms, backup <=2.4 s, rollback at 2.4 s)", false,
         criterion_timeline},
        {5, "finality safety (exhaustive <=6-event sequences)", false, criterion_safety},
        {6, "forgery resistance (10^4 attempts)", false, criterion_forgery},
        {7, "executor serializability (500 batches)", false, criterion_serializability},
        {8, "O(1) verification (cost units, sizes, levels)", false, criterion_o1_verification},
        {9, "benchmark sanity (host-relative)", true, criterion_bench},
        {10, "simulation determinism", false, criterion_determinism},
    };

    int hard_failures = 0;
    for (auto& c : criteria) {
        std::string detail;
        bool pass = c.run(detail);
        const char* verdict = pass ? "PASS" : (c.soft ? "WARN" : "FAIL");
        if (!pass && !c.soft) ++hard_failures;
        std::printf("criterion %2d [%s] %s: %s\n", c.number, verdict, c.name.c_str(),
                    detail.c_str());
        std::fflush(stdout);
    }
    if (hard_failures > 0) {
        std::printf("acceptance: %d criterion(s) failed\n", hard_failures);
        return 1;
    }
    std::printf("acceptance: all criteria passed\n");
    return 0;
}
