#include <doctest.h>

#include <random>

#include "ace/bytes.hpp"
#include "ace/sha256.hpp"

using namespace ace;

namespace {

std::string hash_hex(std::span<const std::uint8_t> data) {
    return hex_encode(sha256::digest(data));
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

struct EngineGuard {
    ~EngineGuard() {
        sha256::set_engine(sha256::Engine::Auto);
        sha256::set_batch_engine(sha256::BatchEngine::Auto);
    }
};

}  // namespace

TEST_CASE("sha256 reference vectors") {
    EngineGuard guard;
    for (auto engine : {sha256::Engine::Scalar, sha256::Engine::ShaNi}) {
        if (engine == sha256::Engine::ShaNi && !sha256::cpu_has_shani()) continue;
        sha256::set_engine(engine);
        CHECK(hash_hex({}) ==
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        CHECK(hash_hex(to_bytes("abc")) ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(hash_hex(to_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
        Bytes seq(65);
        for (int i = 0; i < 65; ++i) seq[i] = static_cast<std::uint8_t>(i);
        CHECK(hash_hex(seq) ==
              "4bfd2c8b6f1eec7a2afeb48b934ee4b2694182027e6d0fc075074f2fabb31781");
    }
}

TEST_CASE("sha256 streaming equals one-shot across split points") {
    std::mt19937_64 rng(7);
    Bytes data = random_bytes(rng, 300);
    Hash32 oneshot = sha256::digest(data);
    for (std::size_t split : {std::size_t{0}, std::size_t{1}, std::size_t{63}, std::size_t{64},
                              std::size_t{65}, std::size_t{128}, std::size_t{299}}) {
        sha256::Hasher h;
        h.update({data.data(), split});
        h.update({data.data() + split, data.size() - split});
        CHECK(h.finalize() == oneshot);
    }
}

TEST_CASE("shani kernel matches scalar reference on random inputs") {
    if (!sha256::cpu_has_shani()) return;
    EngineGuard guard;
    std::mt19937_64 rng(11);
    for (int round = 0; round < 200; ++round) {
        Bytes data = random_bytes(rng, rng() % 513);
        sha256::set_engine(sha256::Engine::Scalar);
        Hash32 ref = sha256::digest(data);
        sha256::set_engine(sha256::Engine::ShaNi);
        CHECK(sha256::digest(data) == ref);
    }
}

TEST_CASE("avx2 batch kernel matches scalar reference") {
    EngineGuard guard;
    std::mt19937_64 rng(13);
    for (std::size_t len : {1u, 32u, 33u, 36u, 64u, 65u, 154u, 244u}) {
        for (std::size_t count : {1u, 7u, 8u, 9u, 16u, 33u}) {
            Bytes data = random_bytes(rng, len * count);
            std::vector<Hash32> expect(count);
            sha256::set_batch_engine(sha256::BatchEngine::Scalar);
            sha256::hash_batch_strided(data.data(), len, len, count,
                                       reinterpret_cast<std::uint8_t*>(expect.data()));
            for (std::size_t i = 0; i < count; ++i) {
                CHECK(expect[i] == sha256::digest({data.data() + i * len, len}));
            }
            if (sha256::cpu_has_avx2()) {
                std::vector<Hash32> got(count);
                sha256::set_batch_engine(sha256::BatchEngine::Avx2x8);
                sha256::hash_batch_strided(data.data(), len, len, count,
                                           reinterpret_cast<std::uint8_t*>(got.data()));
                CHECK(got == expect);
            }
        }
    }
}

TEST_CASE("engine selection reports active kernels") {
    EngineGuard guard;
    sha256::set_engine(sha256::Engine::Scalar);
    CHECK(std::string(sha256::active_engine_name()) == "scalar");
    sha256::set_engine(sha256::Engine::Auto);
    if (sha256::cpu_has_shani()) {
        CHECK(std::string(sha256::active_engine_name()) == "shani");
    }
    sha256::set_batch_engine(sha256::BatchEngine::Auto);
    if (sha256::cpu_has_avx2()) {
        CHECK(std::string(sha256::active_batch_engine_name()) == "avx2x8");
    }
}
