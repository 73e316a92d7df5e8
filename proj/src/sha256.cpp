#include "ace/sha256.hpp"

#include <atomic>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#include <immintrin.h>
#endif

namespace ace::sha256 {

namespace {

constexpr std::uint32_t kInit[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                    0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

constexpr std::uint32_t kRound[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
}

inline std::uint32_t load_be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

using TransformFn = void (*)(std::uint32_t state[8], const std::uint8_t* blocks, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
std::uint64_t read_xcr0() {
    std::uint32_t eax, edx;
    __asm__ volatile("xgetbv" : "=a"(eax), "=d"(edx) : "c"(0));
    return (static_cast<std::uint64_t>(edx) << 32) | eax;
}

bool query_cpu_flag(unsigned bit_reg, unsigned bit) {
    unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
    if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
    unsigned reg = bit_reg == 1 ? ebx : ecx;
    if (!(reg & (1u << bit))) return false;
    // AVX2 additionally needs OS support for ymm state.
    if (bit_reg == 1 && bit == 5) {
        unsigned a = 0, b = 0, c = 0, d = 0;
        __get_cpuid(1, &a, &b, &c, &d);
        if (!(c & (1u << 27))) return false;  // OSXSAVE
        if ((read_xcr0() & 0x6) != 0x6) return false;
    }
    return true;
}
#endif

std::atomic<TransformFn> g_transform{nullptr};
std::atomic<bool> g_batch_avx2{false};
std::atomic<const char*> g_engine_name{"scalar"};
std::atomic<const char*> g_batch_name{"scalar"};

void init_dispatch() {
    if (g_transform.load(std::memory_order_acquire)) return;
    TransformFn fn = &detail::transform_scalar;
    const char* name = "scalar";
    bool batch_avx2 = false;
    const char* bname = "scalar";
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_shani()) {
        fn = &detail::transform_shani;
        name = "shani";
    }
    if (cpu_has_avx2()) {
        batch_avx2 = true;
        bname = "avx2x8";
    }
#endif
    g_batch_avx2.store(batch_avx2, std::memory_order_release);
    g_batch_name.store(bname, std::memory_order_release);
    g_engine_name.store(name, std::memory_order_release);
    g_transform.store(fn, std::memory_order_release);
}

inline TransformFn transform() {
    TransformFn fn = g_transform.load(std::memory_order_acquire);
    if (!fn) {
        init_dispatch();
        fn = g_transform.load(std::memory_order_acquire);
    }
    return fn;
}

}  // namespace

namespace detail {

void transform_scalar(std::uint32_t state[8], const std::uint8_t* blocks, std::size_t n) {
    std::uint32_t w[64];
    while (n--) {
        for (int t = 0; t < 16; ++t) w[t] = load_be32(blocks + 4 * t);
        for (int t = 16; t < 64; ++t) {
            std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
            std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
            w[t] = w[t - 16] + s0 + w[t - 7] + s1;
        }
        std::uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
        std::uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
        for (int t = 0; t < 64; ++t) {
            std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            std::uint32_t ch = (e & f) ^ (~e & g);
            std::uint32_t t1 = h + S1 + ch + kRound[t] + w[t];
            std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            std::uint32_t t2 = S0 + maj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        state[0] += a;
        state[1] += b;
        state[2] += c;
        state[3] += d;
        state[4] += e;
        state[5] += f;
        state[6] += g;
        state[7] += h;
        blocks += 64;
    }
}

}  // namespace detail

bool cpu_has_shani() {
#if defined(__x86_64__) || defined(_M_X64)
    static const bool v = query_cpu_flag(1, 29);
    return v;
#else
    return false;
#endif
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    static const bool v = query_cpu_flag(1, 5);
    return v;
#else
    return false;
#endif
}

void set_engine(Engine e) {
    init_dispatch();
    switch (e) {
        case Engine::Scalar:
            g_transform.store(&detail::transform_scalar, std::memory_order_release);
            g_engine_name.store("scalar", std::memory_order_release);
            break;
        case Engine::ShaNi:
#if defined(__x86_64__) || defined(_M_X64)
            if (cpu_has_shani()) {
                g_transform.store(&detail::transform_shani, std::memory_order_release);
                g_engine_name.store("shani", std::memory_order_release);
            }
#endif
            break;
        case Engine::Auto:
            g_transform.store(nullptr, std::memory_order_release);
            init_dispatch();
            break;
    }
}

void set_batch_engine(BatchEngine e) {
    init_dispatch();
    switch (e) {
        case BatchEngine::Scalar:
            g_batch_avx2.store(false, std::memory_order_release);
            g_batch_name.store("scalar", std::memory_order_release);
            break;
        case BatchEngine::Avx2x8:
            if (cpu_has_avx2()) {
                g_batch_avx2.store(true, std::memory_order_release);
                g_batch_name.store("avx2x8", std::memory_order_release);
            }
            break;
        case BatchEngine::Auto:
            g_batch_avx2.store(cpu_has_avx2(), std::memory_order_release);
            g_batch_name.store(cpu_has_avx2() ? "avx2x8" : "scalar", std::memory_order_release);
            break;
    }
}

const char* active_engine_name() {
    init_dispatch();
    return g_engine_name.load(std::memory_order_acquire);
}

const char* active_batch_engine_name() {
    init_dispatch();
    return g_batch_name.load(std::memory_order_acquire);
}

void Hasher::reset() {
    std::memcpy(state_, kInit, sizeof(state_));
    total_ = 0;
    buflen_ = 0;
}

void Hasher::update(std::span<const std::uint8_t> data) {
    const std::uint8_t* p = data.data();
    std::size_t len = data.size();
    total_ += len;
    if (buflen_ > 0) {
        std::size_t take = std::min<std::size_t>(64 - buflen_, len);
        std::memcpy(buf_ + buflen_, p, take);
        buflen_ += take;
        p += take;
        len -= take;
        if (buflen_ == 64) {
            transform()(state_, buf_, 1);
            buflen_ = 0;
        }
    }
    std::size_t nblocks = len / 64;
    if (nblocks) {
        transform()(state_, p, nblocks);
        p += nblocks * 64;
        len -= nblocks * 64;
    }
    if (len) {
        std::memcpy(buf_, p, len);
        buflen_ = len;
    }
}

void Hasher::finalize(std::uint8_t out[32]) {
    std::uint64_t bitlen = total_ * 8;
    std::uint8_t pad[72];
    std::size_t padlen = (buflen_ < 56) ? (56 - buflen_) : (120 - buflen_);
    pad[0] = 0x80;
    std::memset(pad + 1, 0, padlen - 1);
    put_u64be(pad + padlen, bitlen);
    update({pad, padlen + 8});
    for (int i = 0; i < 8; ++i) put_u32be(out + 4 * i, state_[i]);
}

void hash(std::span<const std::uint8_t> data, std::uint8_t out[32]) {
    Hasher h;
    h.update(data);
    h.finalize(out);
}

Hash32 digest(std::span<const std::uint8_t> data) {
    Hash32 out;
    hash(data, out.data());
    return out;
}

Hash32 digest_parts(std::initializer_list<std::span<const std::uint8_t>> parts) {
    Hasher h;
    for (auto p : parts) h.update(p);
    return h.finalize();
}

namespace {

// Pads one message of `len` bytes into `dst` (padded_len bytes).
inline void pad_into(std::uint8_t* dst, const std::uint8_t* msg, std::size_t len,
                     std::size_t padded_len) {
    std::memcpy(dst, msg, len);
    dst[len] = 0x80;
    std::memset(dst + len + 1, 0, padded_len - len - 9);
    put_u64be(dst + padded_len - 8, static_cast<std::uint64_t>(len) * 8);
}

}  // namespace

void hash_batch(const std::uint8_t* const* msgs, std::size_t msg_len, std::size_t count,
                std::uint8_t* out) {
    init_dispatch();
    std::size_t i = 0;
#if defined(__x86_64__) || defined(_M_X64)
    if (g_batch_avx2.load(std::memory_order_acquire) && count >= 8) {
        const std::size_t padded = ((msg_len + 9 + 63) / 64) * 64;
        const std::size_t nblocks = padded / 64;
        Bytes scratch(8 * padded);
        for (; i + 8 <= count; i += 8) {
            std::uint32_t states[64];
            for (int lane = 0; lane < 8; ++lane) {
                pad_into(scratch.data() + lane * padded, msgs[i + lane], msg_len, padded);
                std::memcpy(states + lane * 8, kInit, sizeof(kInit));
            }
            for (std::size_t b = 0; b < nblocks; ++b) {
                const std::uint8_t* blocks[8];
                for (int lane = 0; lane < 8; ++lane) {
                    blocks[lane] = scratch.data() + lane * padded + b * 64;
                }
                detail::transform8_avx2(states, blocks);
            }
            for (int lane = 0; lane < 8; ++lane) {
                for (int word = 0; word < 8; ++word) {
                    put_u32be(out + (i + lane) * 32 + 4 * word, states[lane * 8 + word]);
                }
            }
        }
    }
#endif
    for (; i < count; ++i) {
        hash({msgs[i], msg_len}, out + i * 32);
    }
}

void hash_batch_strided(const std::uint8_t* base, std::size_t stride, std::size_t msg_len,
                        std::size_t count, std::uint8_t* out) {
    constexpr std::size_t kChunk = 64;
    const std::uint8_t* ptrs[kChunk];
    std::size_t done = 0;
    while (done < count) {
        std::size_t n = std::min(count - done, kChunk);
        for (std::size_t i = 0; i < n; ++i) ptrs[i] = base + (done + i) * stride;
        hash_batch(ptrs, msg_len, n, out + done * 32);
        done += n;
    }
}

}  // namespace ace::sha256
