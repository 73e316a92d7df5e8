#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "ace/bytes.hpp"

namespace ace::sha256 {

// Streaming hasher. One 64-byte block buffered; safe to copy.
class Hasher {
public:
    Hasher() { reset(); }

    void reset();
    void update(std::span<const std::uint8_t> data);
    void finalize(std::uint8_t out[32]);

    Hash32 finalize() {
        Hash32 h;
        finalize(h.data());
        return h;
    }

private:
    std::uint32_t state_[8];
    std::uint64_t total_;
    std::uint8_t buf_[64];
    std::size_t buflen_;
};

void hash(std::span<const std::uint8_t> data, std::uint8_t out[32]);
Hash32 digest(std::span<const std::uint8_t> data);
Hash32 digest_parts(std::initializer_list<std::span<const std::uint8_t>> parts);

// Hashes `count` independent messages that all share the same length.
// msgs[i] points at message i; digests are written to out + 32*i.
// The wide engine processes 8 lanes per pass when available.
void hash_batch(const std::uint8_t* const* msgs, std::size_t msg_len, std::size_t count,
                std::uint8_t* out);

// Same-length messages laid out contiguously at base + i*stride.
void hash_batch_strided(const std::uint8_t* base, std::size_t stride, std::size_t msg_len,
                        std::size_t count, std::uint8_t* out);

// --- kernel selection -------------------------------------------------------
//
// Single-stream engine: scalar reference or SHA-NI.
// Batch engine: scalar loop or AVX2 8-way multi-buffer.
// Auto picks the fastest supported variant at first use; tests pin engines
// explicitly to cross-check every variant against the scalar reference.

enum class Engine { Auto, Scalar, ShaNi };
enum class BatchEngine { Auto, Scalar, Avx2x8 };

void set_engine(Engine e);
void set_batch_engine(BatchEngine e);
const char* active_engine_name();
const char* active_batch_engine_name();

bool cpu_has_shani();
bool cpu_has_avx2();

// Internal kernel entry points, exposed for equivalence tests.
namespace detail {
void transform_scalar(std::uint32_t state[8], const std::uint8_t* blocks, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
void transform_shani(std::uint32_t state[8], const std::uint8_t* blocks, std::size_t n);
// One 64-byte block per lane, eight independent states packed as
// states[lane*8 + word].
void transform8_avx2(std::uint32_t* states, const std::uint8_t* const blocks[8]);
#endif
}  // namespace detail

}  // namespace ace::sha256
