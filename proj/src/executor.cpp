#include "ace/executor.hpp"

#include <algorithm>
#include <cstring>

#include "ace/sha256.hpp"
#include "ace/thread_pool.hpp"

namespace ace::executor {

const Account* AccountState::find(const AccountId& id) const {
    auto it = accounts_.find(id);
    return it == accounts_.end() ? nullptr : &it->second;
}

Account& AccountState::upsert(const AccountId& id) {
    return accounts_[id];
}

void AccountState::put(const AccountId& id, Account acct) {
    accounts_[id] = std::move(acct);
}

std::uint64_t AccountState::total_balance() const {
    std::uint64_t sum = 0;
    for (const auto& [id, acct] : accounts_) sum += acct.balance;
    return sum;
}

Hash32 state_root(const AccountState& state) {
    std::vector<Hash32> leaves;
    leaves.reserve(state.size());
    std::uint8_t preimage[32 + 8 + 32];
    for (const auto& [id, acct] : state.accounts()) {
        std::memcpy(preimage, id.data(), 32);
        put_u64be(preimage + 32, acct.balance);
        Hash32 data_hash = sha256::digest(acct.data);
        std::memcpy(preimage + 40, data_hash.data(), 32);
        leaves.push_back(sha256::digest({preimage, sizeof(preimage)}));
    }
    return wire::merkle_root(leaves);
}

std::array<std::uint8_t, 16> context_address_prefix(const Hash32& id_com,
                                                    std::span<const std::uint8_t> context_tag) {
    Hash32 h = sha256::digest_parts({id_com, context_tag});
    std::array<std::uint8_t, 16> prefix;
    std::memcpy(prefix.data(), h.data(), 16);
    return prefix;
}

AccountId context_account_id(const Hash32& id_com, std::span<const std::uint8_t> context_tag,
                             std::uint64_t index) {
    auto prefix = context_address_prefix(id_com, context_tag);
    std::uint8_t idx_be[8];
    put_u64be(idx_be, index);
    Hash32 suffix = sha256::digest_parts({{prefix.data(), 16}, {idx_be, 8}});
    AccountId id{};
    std::memcpy(id.data(), prefix.data(), 16);
    std::memcpy(id.data() + 16, suffix.data(), 16);
    return id;
}

bool DependencyGraph::has_edge(std::size_t i, std::size_t j) const {
    if (i >= adjacency.size()) return false;
    const auto& nbrs = adjacency[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), static_cast<std::uint32_t>(j));
}

bool DependencyGraph::fast_path_taken(std::size_t i, std::size_t j) const {
    if (i >= confined_prefix.size() || j >= confined_prefix.size()) return false;
    const auto& a = confined_prefix[i];
    const auto& b = confined_prefix[j];
    return a && b && *a != *b;
}

DependencyGraph build_dependency_graph(const std::vector<wire::Transaction>& txs) {
    DependencyGraph g;
    g.tx_count = txs.size();
    g.adjacency.assign(txs.size(), {});
    g.confined_prefix.assign(txs.size(), std::nullopt);

    struct Ref {
        std::uint32_t tx;
        bool writes;
    };
    std::map<AccountId, std::vector<Ref>> by_account;

    std::vector<std::optional<wire::TxPayload>> parsed(txs.size());
    for (std::size_t i = 0; i < txs.size(); ++i) {
        parsed[i] = wire::TxPayload::decode(txs[i].payload);
        if (!parsed[i]) continue;
        const auto& tx = txs[i];
        if (!tx.context_tag.empty()) {
            auto prefix = context_address_prefix(tx.attestation.id_com, tx.context_tag);
            bool confined = !parsed[i]->accounts.empty();
            for (const auto& acct : parsed[i]->accounts) {
                if (std::memcmp(acct.id.data(), prefix.data(), 16) != 0) {
                    confined = false;
                    break;
                }
            }
            if (confined) g.confined_prefix[i] = prefix;
        }
        for (const auto& acct : parsed[i]->accounts) {
            by_account[acct.id].push_back({static_cast<std::uint32_t>(i), acct.writable});
        }
    }

    // Conflict edge: shared account with at least one writer. Cross-context
    // confined pairs can never share an account (distinct 16-byte prefixes),
    // so they are counted as fast-path dismissals, not compared.
    for (const auto& [id, refs] : by_account) {
        bool any_write = false;
        for (const auto& r : refs) any_write |= r.writes;
        if (!any_write || refs.size() < 2) continue;
        for (std::size_t a = 0; a < refs.size(); ++a) {
            for (std::size_t b = a + 1; b < refs.size(); ++b) {
                if (refs[a].tx == refs[b].tx) continue;
                if (!refs[a].writes && !refs[b].writes) continue;
                g.adjacency[refs[a].tx].push_back(refs[b].tx);
                g.adjacency[refs[b].tx].push_back(refs[a].tx);
            }
        }
    }
    for (auto& nbrs : g.adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }

    // Count fast-path pair dismissals across distinct confined prefixes.
    std::map<std::array<std::uint8_t, 16>, std::uint64_t> groups;
    for (const auto& p : g.confined_prefix) {
        if (p) ++groups[*p];
    }
    std::uint64_t total_confined = 0;
    std::uint64_t same_group_pairs = 0;
    for (const auto& [prefix, count] : groups) {
        total_confined += count;
        same_group_pairs += count * (count - 1) / 2;
    }
    g.fast_path_pairs = total_confined * (total_confined - 1) / 2 - same_group_pairs;
    return g;
}

namespace {

struct ParsedInstr {
    wire::Opcode op;
    std::uint8_t idx_a = 0;
    std::uint8_t idx_b = 0;
    std::uint64_t amount = 0;
    std::span<const std::uint8_t> bytes;
};

std::optional<ParsedInstr> parse_instruction(std::span<const std::uint8_t> instr) {
    if (instr.empty()) return std::nullopt;
    ParsedInstr p;
    p.op = static_cast<wire::Opcode>(instr[0]);
    switch (p.op) {
        case wire::Opcode::Transfer:
        case wire::Opcode::CreateAccount:
            if (instr.size() != 11) return std::nullopt;
            p.idx_a = instr[1];
            p.idx_b = instr[2];
            p.amount = get_u64be(instr.data() + 3);
            return p;
        case wire::Opcode::WriteData: {
            if (instr.size() < 4) return std::nullopt;
            p.idx_a = instr[1];
            std::uint16_t len = get_u16be(instr.data() + 2);
            if (instr.size() != 4u + len) return std::nullopt;
            p.bytes = instr.subspan(4);
            return p;
        }
        case wire::Opcode::Mint:
            if (instr.size() != 10) return std::nullopt;
            p.idx_a = instr[1];
            p.amount = get_u64be(instr.data() + 2);
            return p;
        default:
            return std::nullopt;
    }
}

TxDelta fail(FailReason r) {
    TxDelta d;
    d.applied = false;
    d.reason = r;
    return d;
}

// Executes one transaction against a read view of the state, producing
// post-images for written accounts only.
TxDelta execute_tx(const AccountState& state, const wire::Transaction& tx) {
    auto payload = wire::TxPayload::decode(tx.payload);
    if (!payload) return fail(FailReason::MalformedPayload);
    auto instr = parse_instruction(payload->instruction);
    if (!instr) return fail(FailReason::BadInstruction);

    const auto& accounts = payload->accounts;
    auto in_range = [&](std::uint8_t idx) { return idx < accounts.size(); };

    TxDelta d;
    switch (instr->op) {
        case wire::Opcode::Transfer: {
            if (!in_range(instr->idx_a) || !in_range(instr->idx_b)) {
                return fail(FailReason::IndexOutOfRange);
            }
            const auto& from_decl = accounts[instr->idx_a];
            const auto& to_decl = accounts[instr->idx_b];
            if (!from_decl.writable || !to_decl.writable) return fail(FailReason::NotWritable);
            const Account* from = state.find(from_decl.id);
            const Account* to = state.find(to_decl.id);
            if (!from || !to) return fail(FailReason::MissingAccount);
            if (from->balance < instr->amount) return fail(FailReason::InsufficientBalance);
            if (to->balance + instr->amount < to->balance) return fail(FailReason::Overflow);
            if (from_decl.id == to_decl.id) {
                d.writes.emplace_back(from_decl.id, *from);
            } else {
                Account from_post = *from;
                Account to_post = *to;
                from_post.balance -= instr->amount;
                to_post.balance += instr->amount;
                d.writes.emplace_back(from_decl.id, std::move(from_post));
                d.writes.emplace_back(to_decl.id, std::move(to_post));
            }
            break;
        }
        case wire::Opcode::CreateAccount: {
            if (!in_range(instr->idx_a) || !in_range(instr->idx_b)) {
                return fail(FailReason::IndexOutOfRange);
            }
            const auto& funder_decl = accounts[instr->idx_a];
            const auto& target_decl = accounts[instr->idx_b];
            if (!funder_decl.writable || !target_decl.writable) {
                return fail(FailReason::NotWritable);
            }
            const Account* funder = state.find(funder_decl.id);
            if (!funder) return fail(FailReason::MissingAccount);
            if (state.find(target_decl.id)) return fail(FailReason::AccountExists);
            if (funder->balance < instr->amount) return fail(FailReason::InsufficientBalance);
            Account funder_post = *funder;
            funder_post.balance -= instr->amount;
            Account target;
            target.balance = instr->amount;
            if (!tx.context_tag.empty()) target.owner_context = tx.context_tag;
            d.writes.emplace_back(funder_decl.id, std::move(funder_post));
            d.writes.emplace_back(target_decl.id, std::move(target));
            break;
        }
        case wire::Opcode::WriteData: {
            if (!in_range(instr->idx_a)) return fail(FailReason::IndexOutOfRange);
            const auto& decl = accounts[instr->idx_a];
            if (!decl.writable) return fail(FailReason::NotWritable);
            const Account* acct = state.find(decl.id);
            if (!acct) return fail(FailReason::MissingAccount);
            Account post = *acct;
            post.data.assign(instr->bytes.begin(), instr->bytes.end());
            d.writes.emplace_back(decl.id, std::move(post));
            break;
        }
        case wire::Opcode::Mint: {
            if (!in_range(instr->idx_a)) return fail(FailReason::IndexOutOfRange);
            const auto& decl = accounts[instr->idx_a];
            if (!decl.writable) return fail(FailReason::NotWritable);
            const Account* acct = state.find(decl.id);
            if (!acct) return fail(FailReason::MissingAccount);
            if (acct->balance + instr->amount < acct->balance) return fail(FailReason::Overflow);
            Account post = *acct;
            post.balance += instr->amount;
            d.writes.emplace_back(decl.id, std::move(post));
            break;
        }
    }
    d.applied = true;
    return d;
}

void apply_delta(AccountState& state, const TxDelta& d) {
    if (!d.applied) return;
    for (const auto& [id, post] : d.writes) {
        state.put(id, post);
    }
}

}  // namespace

std::vector<TxDelta> execute_batch(AccountState& state, const std::vector<wire::Transaction>& txs,
                                   const DependencyGraph& graph, unsigned parallelism) {
    // Wave schedule: a transaction runs one wave after its last conflicting
    // predecessor, so conflicting transactions always apply in block order.
    std::vector<std::uint32_t> wave(txs.size(), 0);
    std::uint32_t max_wave = 0;
    for (std::size_t i = 0; i < txs.size(); ++i) {
        std::uint32_t w = 0;
        for (std::uint32_t j : graph.adjacency[i]) {
            if (j < i) w = std::max(w, wave[j] + 1);
        }
        wave[i] = w;
        max_wave = std::max(max_wave, w);
    }

    std::vector<std::vector<std::uint32_t>> buckets(max_wave + 1);
    for (std::size_t i = 0; i < txs.size(); ++i) {
        buckets[wave[i]].push_back(static_cast<std::uint32_t>(i));
    }

    std::vector<TxDelta> deltas(txs.size());
    std::optional<ThreadPool> local;
    ThreadPool* pool = nullptr;
    if (parallelism == 0) {
        pool = &ThreadPool::global();
    } else if (parallelism > 1) {
        local.emplace(parallelism);
        pool = &*local;
    }
    for (const auto& bucket : buckets) {
        if (pool) {
            pool->parallel_for(bucket.size(), [&](std::size_t k) {
                std::uint32_t idx = bucket[k];
                deltas[idx] = execute_tx(state, txs[idx]);
            });
        } else {
            for (std::uint32_t idx : bucket) deltas[idx] = execute_tx(state, txs[idx]);
        }
        for (std::uint32_t idx : bucket) {
            apply_delta(state, deltas[idx]);
        }
    }
    return deltas;
}

std::vector<TxDelta> execute_sequential(AccountState& state,
                                        const std::vector<wire::Transaction>& txs) {
    std::vector<TxDelta> deltas;
    deltas.reserve(txs.size());
    for (const auto& tx : txs) {
        TxDelta d = execute_tx(state, tx);
        apply_delta(state, d);
        deltas.push_back(std::move(d));
    }
    return deltas;
}

const char* to_string(FailReason r) {
    switch (r) {
        case FailReason::None: return "None";
        case FailReason::MalformedPayload: return "MalformedPayload";
        case FailReason::BadInstruction: return "BadInstruction";
        case FailReason::IndexOutOfRange: return "IndexOutOfRange";
        case FailReason::MissingAccount: return "MissingAccount";
        case FailReason::AccountExists: return "AccountExists";
        case FailReason::NotWritable: return "NotWritable";
        case FailReason::InsufficientBalance: return "InsufficientBalance";
        case FailReason::Overflow: return "Overflow";
    }
    return "?";
}

}  // namespace ace::executor
