#include "ace/finality.hpp"

#include <cstdio>

namespace ace::finality {

std::string AuditRecord::line() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "slot=%llu from=%s to=%s event=%s t_ms=%llu.%03llu",
                  static_cast<unsigned long long>(slot), to_string(from), to_string(to),
                  event.c_str(), static_cast<unsigned long long>(t_us / 1000),
                  static_cast<unsigned long long>(t_us % 1000));
    return buf;
}

SlotFinality::SlotFinality(std::uint64_t slot, const FinalityConfig& cfg,
                           std::uint64_t total_stake)
    : slot_(slot), cfg_(cfg), total_stake_(total_stake) {}

std::uint64_t SlotFinality::entered_at_us(State s) const {
    auto it = entered_at_.find(s);
    return it == entered_at_.end() ? 0 : it->second;
}

TransitionResult SlotFinality::no_change() const {
    TransitionResult r;
    r.state = state_;
    return r;
}

TransitionResult SlotFinality::transition(State to, const char* event, std::uint64_t now_us,
                                          std::vector<AuditRecord>* log) {
    TransitionResult r;
    if (log) {
        log->push_back({slot_, state_, to, event, now_us});
    }
    state_ = to;
    entered_at_.emplace(to, now_us);
    r.state = to;
    r.transitioned = true;
    return r;
}

TransitionResult SlotFinality::on_vote(const Hash32& voter, std::uint64_t stake,
                                       std::uint64_t now_us, std::vector<AuditRecord>* log) {
    if (state_ == State::Hard || state_ == State::RolledBack) {
        return no_change();  // votes on settled slots carry no meaning
    }
    if (!voters_.insert(voter).second) {
        return no_change();  // duplicate vote, idempotent
    }
    vote_weight_ += stake;
    if (state_ == State::Pending && vote_weight_ >= cfg_.quorum_threshold(total_stake_)) {
        return transition(State::Soft, "quorum", now_us, log);
    }
    return no_change();
}

TransitionResult SlotFinality::on_fc(bool valid, std::uint64_t now_us,
                                     std::vector<AuditRecord>* log) {
    if (valid) {
        saw_valid_fc_ = true;
        if (state_ == State::Soft || state_ == State::BackupWait) {
            return transition(State::Hard, "fc_valid", now_us, log);
        }
        return no_change();
    }
    if (state_ == State::Soft) {
        slashed_builder_ = true;
        TransitionResult r = transition(State::RolledBack, "fc_invalid", now_us, log);
        r.requeue = true;
        r.slashed_now = true;
        return r;
    }
    // In BackupWait an invalid FC is ignored; the window timers decide.
    return no_change();
}

TransitionResult SlotFinality::on_builder_timeout(std::uint64_t now_us,
                                                  std::vector<AuditRecord>* log) {
    if (state_ == State::Soft && !saw_valid_fc_) {
        slashed_builder_ = true;
        TransitionResult r = transition(State::BackupWait, "builder_timeout", now_us, log);
        r.slashed_now = true;
        return r;
    }
    return no_change();
}

TransitionResult SlotFinality::on_backup_timeout(std::uint64_t now_us,
                                                 std::vector<AuditRecord>* log) {
    if (state_ == State::BackupWait && !saw_valid_fc_) {
        TransitionResult r = transition(State::RolledBack, "backup_timeout", now_us, log);
        r.requeue = true;
        return r;
    }
    return no_change();
}

const char* to_string(State s) {
    switch (s) {
        case State::Pending: return "Pending";
        case State::Soft: return "Soft";
        case State::BackupWait: return "BackupWait";
        case State::Hard: return "Hard";
        case State::RolledBack: return "RolledBack";
    }
    return "?";
}

}  // namespace ace::finality
