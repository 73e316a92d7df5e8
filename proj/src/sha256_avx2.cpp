// AVX2 8-way multi-buffer compression: eight independent messages advance one
// 64-byte block per call. Lane j's state lives at states[j*8 .. j*8+7].

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>

namespace ace::sha256::detail {

namespace {

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

}  // namespace

__attribute__((target("avx2"))) static inline __m256i rotr8(__m256i x, int n) {
    return _mm256_or_si256(_mm256_srli_epi32(x, n), _mm256_slli_epi32(x, 32 - n));
}

__attribute__((target("avx2"))) static inline std::uint32_t be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void transform8_avx2(std::uint32_t* states, const std::uint8_t* const blocks[8])
    __attribute__((target("avx2")));

void transform8_avx2(std::uint32_t* states, const std::uint8_t* const blocks[8]) {
    __m256i w[16];
    for (int t = 0; t < 16; ++t) {
        w[t] = _mm256_set_epi32(
            static_cast<int>(be32(blocks[7] + 4 * t)), static_cast<int>(be32(blocks[6] + 4 * t)),
            static_cast<int>(be32(blocks[5] + 4 * t)), static_cast<int>(be32(blocks[4] + 4 * t)),
            static_cast<int>(be32(blocks[3] + 4 * t)), static_cast<int>(be32(blocks[2] + 4 * t)),
            static_cast<int>(be32(blocks[1] + 4 * t)), static_cast<int>(be32(blocks[0] + 4 * t)));
    }

    __m256i v[8];
    for (int word = 0; word < 8; ++word) {
        v[word] = _mm256_set_epi32(
            static_cast<int>(states[7 * 8 + word]), static_cast<int>(states[6 * 8 + word]),
            static_cast<int>(states[5 * 8 + word]), static_cast<int>(states[4 * 8 + word]),
            static_cast<int>(states[3 * 8 + word]), static_cast<int>(states[2 * 8 + word]),
            static_cast<int>(states[1 * 8 + word]), static_cast<int>(states[0 * 8 + word]));
    }
    __m256i a = v[0], b = v[1], c = v[2], d = v[3], e = v[4], f = v[5], g = v[6], h = v[7];

    for (int t = 0; t < 64; ++t) {
        __m256i wt;
        if (t < 16) {
            wt = w[t];
        } else {
            __m256i w15 = w[(t - 15) & 15];
            __m256i w2 = w[(t - 2) & 15];
            __m256i s0 = _mm256_xor_si256(_mm256_xor_si256(rotr8(w15, 7), rotr8(w15, 18)),
                                          _mm256_srli_epi32(w15, 3));
            __m256i s1 = _mm256_xor_si256(_mm256_xor_si256(rotr8(w2, 17), rotr8(w2, 19)),
                                          _mm256_srli_epi32(w2, 10));
            wt = _mm256_add_epi32(_mm256_add_epi32(w[t & 15], s0),
                                  _mm256_add_epi32(w[(t - 7) & 15], s1));
            w[t & 15] = wt;
        }
        __m256i S1 = _mm256_xor_si256(_mm256_xor_si256(rotr8(e, 6), rotr8(e, 11)), rotr8(e, 25));
        __m256i ch = _mm256_xor_si256(_mm256_and_si256(e, f),
                                      _mm256_andnot_si256(e, g));
        __m256i t1 = _mm256_add_epi32(
            _mm256_add_epi32(_mm256_add_epi32(h, S1), _mm256_add_epi32(ch, wt)),
            _mm256_set1_epi32(static_cast<int>(kRound[t])));
        __m256i S0 = _mm256_xor_si256(_mm256_xor_si256(rotr8(a, 2), rotr8(a, 13)), rotr8(a, 22));
        __m256i maj = _mm256_xor_si256(
            _mm256_xor_si256(_mm256_and_si256(a, b), _mm256_and_si256(a, c)),
            _mm256_and_si256(b, c));
        __m256i t2 = _mm256_add_epi32(S0, maj);
        h = g;
        g = f;
        f = e;
        e = _mm256_add_epi32(d, t1);
        d = c;
        c = b;
        b = a;
        a = _mm256_add_epi32(t1, t2);
    }

    __m256i res[8] = {a, b, c, d, e, f, g, h};
    alignas(32) std::uint32_t tmp[8];
    for (int word = 0; word < 8; ++word) {
        res[word] = _mm256_add_epi32(res[word], v[word]);
        _mm256_store_si256(reinterpret_cast<__m256i*>(tmp), res[word]);
        for (int lane = 0; lane < 8; ++lane) {
            states[lane * 8 + word] = tmp[lane];
        }
    }
}

}  // namespace ace::sha256::detail

#endif  // x86_64
