#include <doctest.h>

#include <vector>

#include "ace/finality.hpp"

using namespace ace;
using namespace ace::finality;

namespace {

Hash32 voter_id(std::uint8_t v) {
    Hash32 h{};
    h.fill(v);
    return h;
}

SlotFinality tracker(std::uint64_t total_stake = 400) {
    return SlotFinality(1, FinalityConfig{}, total_stake);
}

}  // namespace

TEST_CASE("quorum arithmetic") {
    FinalityConfig cfg;
    CHECK(cfg.quorum_threshold(400) == 267);
    CHECK(cfg.quorum_threshold(100) == 67);
    CHECK(cfg.quorum_threshold(3) == 2);
    CHECK(cfg.quorum_threshold(4) == 3);
}

TEST_CASE("votes accumulate to soft finality") {
    SlotFinality f = tracker(400);
    CHECK(f.state() == State::Pending);
    f.on_vote(voter_id(1), 100, 100, nullptr);
    f.on_vote(voter_id(2), 100, 110, nullptr);
    CHECK(f.state() == State::Pending);  // 200 < 267
    f.on_vote(voter_id(3), 100, 120, nullptr);
    CHECK(f.state() == State::Soft);  // 300 >= 267
    CHECK(f.entered_at_us(State::Soft) == 120);
}

TEST_CASE("duplicate votes are idempotent") {
    SlotFinality f = tracker(400);
    f.on_vote(voter_id(1), 100, 100, nullptr);
    f.on_vote(voter_id(1), 100, 101, nullptr);
    f.on_vote(voter_id(1), 100, 102, nullptr);
    CHECK(f.vote_weight() == 100);
    CHECK(f.state() == State::Pending);
}

TEST_CASE("weighted quorum: stakes 50/30/20") {
    SlotFinality f(1, FinalityConfig{}, 100);
    f.on_vote(voter_id(1), 50, 10, nullptr);
    CHECK(f.state() == State::Pending);
    f.on_vote(voter_id(3), 20, 20, nullptr);
    CHECK(f.state() == State::Soft);  // 70 >= ceil(200/3) = 67
}

TEST_CASE("quorum exactness against a brute-force subset oracle") {
    // up to 8 validators with assorted stakes; Soft iff the voted subset
    // reaches ceil(2*total/3)
    std::vector<std::uint64_t> stakes = {50, 30, 20, 7, 13, 99, 1, 40};
    FinalityConfig cfg;
    for (std::size_t n = 1; n <= stakes.size(); ++n) {
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) total += stakes[i];
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::uint64_t weight = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1u << i)) weight += stakes[i];
            }
            bool oracle_soft = 3 * weight >= 2 * total;  // ceil-free integer form
            SlotFinality f(1, cfg, total);
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1u << i)) {
                    f.on_vote(voter_id(static_cast<std::uint8_t>(i)), stakes[i], 5, nullptr);
                }
            }
            CHECK((f.state() == State::Soft) == oracle_soft);
        }
    }
}

TEST_CASE("fc transitions") {
    SUBCASE("soft + valid fc -> hard") {
        SlotFinality f = tracker(300);
        f.on_vote(voter_id(1), 300, 10, nullptr);
        REQUIRE(f.state() == State::Soft);
        auto r = f.on_fc(true, 20, nullptr);
        CHECK(r.state == State::Hard);
        CHECK(!r.requeue);
    }
    SUBCASE("soft + invalid fc -> rolled back + slash") {
        SlotFinality f = tracker(300);
        f.on_vote(voter_id(1), 300, 10, nullptr);
        auto r = f.on_fc(false, 20, nullptr);
        CHECK(r.state == State::RolledBack);
        CHECK(r.requeue);
        CHECK(r.slashed_now);
        CHECK(f.slashed_builder());
    }
    SUBCASE("backupwait + invalid fc is ignored") {
        SlotFinality f = tracker(300);
        f.on_vote(voter_id(1), 300, 10, nullptr);
        f.on_builder_timeout(1200, nullptr);
        REQUIRE(f.state() == State::BackupWait);
        auto r = f.on_fc(false, 1300, nullptr);
        CHECK(r.state == State::BackupWait);
        CHECK(!r.transitioned);
    }
    SUBCASE("backupwait + valid fc -> hard") {
        SlotFinality f = tracker(300);
        f.on_vote(voter_id(1), 300, 10, nullptr);
        f.on_builder_timeout(1200, nullptr);
        auto r = f.on_fc(true, 1500, nullptr);
        CHECK(r.state == State::Hard);
    }
    SUBCASE("valid fc while pending does not transition") {
        SlotFinality f = tracker(300);
        auto r = f.on_fc(true, 20, nullptr);
        CHECK(r.state == State::Pending);
        CHECK(!r.transitioned);
    }
}

TEST_CASE("timeout transitions") {
    SUBCASE("builder timeout slashes and enters backup wait") {
        SlotFinality f = tracker(300);
        f.on_vote(voter_id(1), 300, 10, nullptr);
        auto r = f.on_builder_timeout(1200, nullptr);
        CHECK(r.state == State::BackupWait);
        CHECK(r.slashed_now);
        CHECK(f.slashed_builder());
    }
    SUBCASE("backup timeout rolls back and requeues") {
        SlotFinality f = tracker(300);
        f.on_vote(voter_id(1), 300, 10, nullptr);
        f.on_builder_timeout(1200, nullptr);
        auto r = f.on_backup_timeout(2400, nullptr);
        CHECK(r.state == State::RolledBack);
        CHECK(r.requeue);
    }
    SUBCASE("backup fc before the final window keeps the block") {
        SlotFinality f = tracker(300);
        f.on_vote(voter_id(1), 300, 10, nullptr);
        f.on_builder_timeout(1200, nullptr);
        f.on_fc(true, 1600, nullptr);
        REQUIRE(f.state() == State::Hard);
        auto r = f.on_backup_timeout(2400, nullptr);
        CHECK(r.state == State::Hard);
        CHECK(!r.transitioned);
    }
    SUBCASE("timeouts in pending do nothing") {
        SlotFinality f = tracker(300);
        CHECK(!f.on_builder_timeout(1200, nullptr).transitioned);
        CHECK(!f.on_backup_timeout(2400, nullptr).transitioned);
        CHECK(f.state() == State::Pending);
    }
}

TEST_CASE("audit log records transitions with timestamps") {
    std::vector<AuditRecord> log;
    SlotFinality f(7, FinalityConfig{}, 300);
    f.on_vote(voter_id(1), 300, 123456, &log);
    f.on_fc(true, 234567, &log);
    REQUIRE(log.size() == 2);
    CHECK(log[0].line() == "slot=7 from=Pending to=Soft event=quorum t_ms=123.456");
    CHECK(log[1].line() == "slot=7 from=Soft to=Hard event=fc_valid t_ms=234.567");
}

TEST_CASE("exhaustive event sequences: hard is terminal, hard requires a valid fc") {
    // alphabet: votes from four equal-stake validators, both fc outcomes and
    // both timers; every sequence of length <= 6
    enum Ev { V0, V1, V2, V3, FcOk, FcBad, TimerK, TimerKK, kEvCount };

    std::uint64_t checked = 0;
    for (int len = 0; len <= 6; ++len) {
        std::uint64_t combos = 1;
        for (int i = 0; i < len; ++i) combos *= kEvCount;
        for (std::uint64_t code = 0; code < combos; ++code) {
            SlotFinality f(1, FinalityConfig{}, 400);
            bool was_hard = false;
            bool saw_valid_fc = false;
            std::uint64_t c = code;
            for (int step = 0; step < len; ++step) {
                Ev ev = static_cast<Ev>(c % kEvCount);
                c /= kEvCount;
                std::uint64_t now = 100 * (step + 1);
                switch (ev) {
                    case V0:
                    case V1:
                    case V2:
                    case V3:
                        f.on_vote(voter_id(static_cast<std::uint8_t>(ev)), 100, now, nullptr);
                        break;
                    case FcOk:
                        saw_valid_fc = true;
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
                if (was_hard) {
                    REQUIRE(f.state() == State::Hard);  // no event leaves Hard
                }
                if (f.state() == State::Hard) {
                    was_hard = true;
                    REQUIRE(saw_valid_fc);  // Hard only via a valid FC
                }
            }
            ++checked;
        }
    }
    CHECK(checked > 299000);  // 8^0 + ... + 8^6
}

TEST_CASE("slash flag never resets") {
    SlotFinality f = tracker(300);
    f.on_vote(voter_id(1), 300, 10, nullptr);
    f.on_builder_timeout(1200, nullptr);
    CHECK(f.slashed_builder());
    f.on_fc(true, 1500, nullptr);
    CHECK(f.state() == State::Hard);
    CHECK(f.slashed_builder());
}
