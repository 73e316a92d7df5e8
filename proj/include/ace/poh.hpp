#pragma once

#include "ace/bytes.hpp"

namespace ace::sim {

// Sequential SHA-256 hash chain acting as a verifiable clock.
struct PohChain {
    Hash32 current{};
    std::uint64_t tick_count = 0;
    std::uint32_t ticks_per_slot = 64;
};

PohChain poh_genesis(const Hash32& seed, std::uint32_t ticks_per_slot);
void poh_advance(PohChain& chain, std::uint64_t n_ticks);
bool poh_verify(const Hash32& h0, const Hash32& hn, std::uint64_t n_ticks);

}  // namespace ace::sim
