#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ace/bytes.hpp"

namespace ace::finality {

enum class State : std::uint8_t { Pending, Soft, BackupWait, Hard, RolledBack };

struct FinalityConfig {
    unsigned builder_window_slots = 3;  // K
    unsigned backup_window_slots = 3;   // K'
    std::uint64_t slot_duration_ms = 400;
    unsigned quorum_num = 2;
    unsigned quorum_den = 3;

    std::uint64_t quorum_threshold(std::uint64_t total_stake) const {
        return (static_cast<std::uint64_t>(quorum_num) * total_stake + quorum_den - 1) /
               quorum_den;
    }
    std::uint64_t builder_window_us() const {
        return static_cast<std::uint64_t>(builder_window_slots) * slot_duration_ms * 1000;
    }
    std::uint64_t total_window_us() const {
        return static_cast<std::uint64_t>(builder_window_slots + backup_window_slots) *
               slot_duration_ms * 1000;
    }
};

struct AuditRecord {
    std::uint64_t slot = 0;
    State from = State::Pending;
    State to = State::Pending;
    std::string event;
    std::uint64_t t_us = 0;

    std::string line() const;
};

struct TransitionResult {
    State state = State::Pending;
    bool transitioned = false;
    bool requeue = false;      // RolledBack entered; transactions go back to the pool
    bool slashed_now = false;  // builder slash raised by this event
};

// Per-(slot, node) finality tracker.
//
// Transition graph, exactly:
//   Pending    -> Soft        on quorum of stake-weighted votes
//   Soft       -> Hard        on valid FC
//   Soft       -> RolledBack  on invalid FC (slash)
//   Soft       -> BackupWait  on builder-window timeout (slash)
//   BackupWait -> Hard        on valid FC
//   BackupWait -> RolledBack  on backup-window timeout
// Hard is terminal. An invalid FC in BackupWait is ignored.
class SlotFinality {
public:
    SlotFinality() = default;
    SlotFinality(std::uint64_t slot, const FinalityConfig& cfg, std::uint64_t total_stake);

    State state() const { return state_; }
    bool slashed_builder() const { return slashed_builder_; }
    std::uint64_t vote_weight() const { return vote_weight_; }
    bool saw_valid_fc() const { return saw_valid_fc_; }
    std::uint64_t slot() const { return slot_; }

    // Time the machine entered `s`, in simulated microseconds; 0 if never.
    std::uint64_t entered_at_us(State s) const;

    TransitionResult on_vote(const Hash32& voter, std::uint64_t stake, std::uint64_t now_us,
                             std::vector<AuditRecord>* log = nullptr);
    TransitionResult on_fc(bool valid, std::uint64_t now_us,
                           std::vector<AuditRecord>* log = nullptr);
    TransitionResult on_builder_timeout(std::uint64_t now_us,
                                        std::vector<AuditRecord>* log = nullptr);
    TransitionResult on_backup_timeout(std::uint64_t now_us,
                                       std::vector<AuditRecord>* log = nullptr);

private:
    TransitionResult transition(State to, const char* event, std::uint64_t now_us,
                                std::vector<AuditRecord>* log);
    TransitionResult no_change() const;

    std::uint64_t slot_ = 0;
    FinalityConfig cfg_;
    std::uint64_t total_stake_ = 0;
    State state_ = State::Pending;
    std::uint64_t vote_weight_ = 0;
    std::set<Hash32> voters_;
    bool slashed_builder_ = false;
    bool saw_valid_fc_ = false;
    std::map<State, std::uint64_t> entered_at_;
};

const char* to_string(State s);

}  // namespace ace::finality
