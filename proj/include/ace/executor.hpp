#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ace/bytes.hpp"
#include "ace/wire.hpp"

namespace ace::executor {

using wire::AccountId;

struct Account {
    std::uint64_t balance = 0;
    Bytes data;
    std::optional<Bytes> owner_context;

    bool operator==(const Account&) const = default;
};

class AccountState {
public:
    const Account* find(const AccountId& id) const;
    Account& upsert(const AccountId& id);
    void put(const AccountId& id, Account acct);
    bool contains(const AccountId& id) const { return accounts_.count(id) != 0; }
    std::size_t size() const { return accounts_.size(); }
    std::uint64_t total_balance() const;

    const std::map<AccountId, Account>& accounts() const { return accounts_; }

    bool operator==(const AccountState&) const = default;

private:
    std::map<AccountId, Account> accounts_;
};

// Merkle root over accounts sorted by id; leaf preimage is
// id || balance_be64 || SHA-256(data). Empty state hashes to zero.
Hash32 state_root(const AccountState& state);

enum class FailReason : std::uint8_t {
    None = 0,
    MalformedPayload,
    BadInstruction,
    IndexOutOfRange,
    MissingAccount,
    AccountExists,
    NotWritable,
    InsufficientBalance,
    Overflow,
};

struct TxDelta {
    bool applied = false;
    FailReason reason = FailReason::None;
    // Post-images of every written account, in declared-account order.
    std::vector<std::pair<AccountId, Account>> writes;
};

// First 16 bytes of every account id owned by (identity, context_tag).
std::array<std::uint8_t, 16> context_address_prefix(const Hash32& id_com,
                                                    std::span<const std::uint8_t> context_tag);

// Builds a full account id inside a context-derived address space.
AccountId context_account_id(const Hash32& id_com, std::span<const std::uint8_t> context_tag,
                             std::uint64_t index);

struct DependencyGraph {
    std::size_t tx_count = 0;
    // Sorted neighbor lists; conflicts only.
    std::vector<std::vector<std::uint32_t>> adjacency;
    // Context confinement: prefix present iff the tx carries a context tag and
    // every declared account sits inside the derived address space.
    std::vector<std::optional<std::array<std::uint8_t, 16>>> confined_prefix;
    // Pairs dismissed by the context fast path without account-set comparison.
    std::uint64_t fast_path_pairs = 0;

    bool has_edge(std::size_t i, std::size_t j) const;
    // True iff the pair (i, j) is decided by the context fast path.
    bool fast_path_taken(std::size_t i, std::size_t j) const;
};

DependencyGraph build_dependency_graph(const std::vector<wire::Transaction>& txs);

// Executes a batch against `state`. Conflicting transactions run in block
// order; the result is identical to sequential execution for any parallelism.
// Failed transactions leave no trace in the state.
std::vector<TxDelta> execute_batch(AccountState& state, const std::vector<wire::Transaction>& txs,
                                   const DependencyGraph& graph, unsigned parallelism = 0);

// Sequential oracle: plain in-order execution, no scheduling.
std::vector<TxDelta> execute_sequential(AccountState& state,
                                        const std::vector<wire::Transaction>& txs);

const char* to_string(FailReason r);

}  // namespace ace::executor
