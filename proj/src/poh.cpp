#include "ace/poh.hpp"

#include "ace/sha256.hpp"

namespace ace::sim {

PohChain poh_genesis(const Hash32& seed, std::uint32_t ticks_per_slot) {
    PohChain c;
    c.current = seed;
    c.tick_count = 0;
    c.ticks_per_slot = ticks_per_slot;
    return c;
}

void poh_advance(PohChain& chain, std::uint64_t n_ticks) {
    Hash32 h = chain.current;
    for (std::uint64_t i = 0; i < n_ticks; ++i) {
        h = sha256::digest(h);
    }
    chain.current = h;
    chain.tick_count += n_ticks;
}

bool poh_verify(const Hash32& h0, const Hash32& hn, std::uint64_t n_ticks) {
    Hash32 h = h0;
    for (std::uint64_t i = 0; i < n_ticks; ++i) {
        h = sha256::digest(h);
    }
    return h == hn;
}

}  // namespace ace::sim
