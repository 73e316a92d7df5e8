#include <doctest.h>

#include <random>
#include <set>

#include "ace/crypto.hpp"
#include "ace/hkdf.hpp"
#include "ace/sha256.hpp"

using namespace ace;
using namespace ace::crypto;

namespace {

Rev test_rev(std::uint64_t seed = 1) {
    return Rev::from_seed(seed);
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

}  // namespace

TEST_CASE("hmac-sha256 rfc 4231 vectors") {
    Bytes key1(20, 0x0b);
    CHECK(hex_encode(hmac_sha256(key1, to_bytes("Hi There"))) ==
          "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
    CHECK(hex_encode(hmac_sha256(to_bytes("Jefe"), to_bytes("what do ya want for nothing?"))) ==
          "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("hkdf-sha256 rfc 5869 test case 1") {
    Bytes ikm(22, 0x0b);
    Bytes salt;
    for (int i = 0; i <= 0x0c; ++i) salt.push_back(static_cast<std::uint8_t>(i));
    Bytes info;
    for (int i = 0xf0; i <= 0xf9; ++i) info.push_back(static_cast<std::uint8_t>(i));

    Hash32 prk = hkdf_extract(salt, ikm);
    CHECK(hex_encode(prk) == "077709362c2e32df0ddc3f0dc47bba6390b6c73bb50f9c3122ec844ad7c2b3e5");

    Bytes okm = hkdf_sha256(ikm, salt, info, 42);
    CHECK(hex_encode(okm) ==
          "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf"
          "34007208d5b887185865");
    Bytes okm32 = hkdf_sha256(ikm, salt, info, 32);
    CHECK(hex_encode(okm32) ==
          "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf");
}

TEST_CASE("rev parsing rejects malformed length") {
    Bytes short_rev(31, 1);
    Bytes long_rev(33, 1);
    Bytes ok(32, 1);
    CHECK(!Rev::from_bytes(short_rev).has_value());
    CHECK(!Rev::from_bytes(long_rev).has_value());
    CHECK(Rev::from_bytes(ok).has_value());
}

TEST_CASE("derive_key determinism and context isolation") {
    Rev rev = test_rev();
    Bytes salt1 = to_bytes("context-one");
    Bytes salt2 = to_bytes("context-two");
    DerivedKey a = derive_key(rev, kInfoMempoolAttest, salt1);
    DerivedKey b = derive_key(rev, kInfoMempoolAttest, salt1);
    DerivedKey c = derive_key(rev, kInfoMempoolAttest, salt2);
    CHECK(a.bytes == b.bytes);
    CHECK(a.bytes != c.bytes);
    CHECK_THROWS(derive_key(rev, std::span<const std::uint8_t>{}, salt1));
}

TEST_CASE("context isolation over a corpus of context pairs") {
    Rev rev = test_rev(3);
    std::set<Hash32> seen;
    for (int i = 0; i < 64; ++i) {
        Bytes ctx = to_bytes("ctx:" + std::to_string(i));
        DerivedKey k = derive_key(rev, kInfoMempoolAttest, ctx);
        CHECK(seen.insert(k.bytes).second);
    }
}

TEST_CASE("seven canonical streams, pairwise distinct, composition") {
    Rev rev = test_rev(4);
    auto streams = derive_canonical_streams(rev);
    std::set<Hash32> unique;
    for (const auto& k : streams) unique.insert(k.bytes);
    CHECK(unique.size() == 7);
    for (std::size_t i = 0; i < kCanonicalStreamInfos.size(); ++i) {
        DerivedKey direct = derive_key(rev, kCanonicalStreamInfos[i], {});
        CHECK(direct.bytes == streams[i].bytes);
    }
}

TEST_CASE("distinct revs give distinct first streams over 100 pairs") {
    std::set<Hash32> seen;
    for (std::uint64_t i = 0; i < 200; ++i) {
        Rev rev = test_rev(1000 + i);
        auto k = derive_key(rev, kInfoEd25519Solana, {});
        CHECK(seen.insert(k.bytes).second);
    }
}

TEST_CASE("validator key triple") {
    Rev rev = test_rev(5);
    Bytes validator_id = to_bytes("validator-7");
    Domain domain{1, 42};
    ValidatorKeys e0 = derive_validator_keys(rev, validator_id, 0, domain);
    ValidatorKeys e0_again = derive_validator_keys(rev, validator_id, 0, domain);
    ValidatorKeys e1 = derive_validator_keys(rev, validator_id, 1, domain);

    CHECK(e0.consensus.bytes == e0_again.consensus.bytes);
    CHECK(e0.attest.bytes == e0_again.attest.bytes);
    CHECK(e0.vote.bytes == e0_again.vote.bytes);
    // epoch rotation changes the vote key only
    CHECK(e0.vote.bytes != e1.vote.bytes);
    CHECK(e0.consensus.bytes == e1.consensus.bytes);
    CHECK(e0.attest.bytes == e1.attest.bytes);
    // distinct info strings keep the keys pairwise distinct
    CHECK(e0.vote.bytes != e0.attest.bytes);
    CHECK(e0.vote.bytes != e0.consensus.bytes);
    CHECK(e0.attest.bytes != e0.consensus.bytes);
}

TEST_CASE("domain codec is 8 bytes big-endian") {
    Domain d{0x0102, 0x030405060708};
    auto enc = d.encode();
    CHECK(enc.size() == 8);
    CHECK(enc[0] == 0x01);
    CHECK(enc[1] == 0x02);
    CHECK(enc[2] == 0x03);
    CHECK(enc[7] == 0x08);
    auto back = Domain::decode(enc);
    REQUIRE(back.has_value());
    CHECK(*back == d);
}

TEST_CASE("id commitment determinism, salt sensitivity, no rev leakage") {
    Rev rev = test_rev(6);
    Domain domain{1, 9};
    Hash32 salt{};
    auto c1 = id_commitment(rev, salt, domain);
    auto c2 = id_commitment(rev, salt, domain);
    CHECK(c1.bytes == c2.bytes);

    std::mt19937_64 rng(99);
    std::set<Hash32> seen;
    for (int i = 0; i < 1000; ++i) {
        Hash32 s;
        for (auto& b : s) b = static_cast<std::uint8_t>(rng());
        auto c = id_commitment(rev, s, domain);
        CHECK(seen.insert(c.bytes).second);
        // no 8-byte window of the REV shows up in the commitment
        for (std::size_t off = 0; off + 8 <= 32; ++off) {
            CHECK(!contains_subsequence(c.bytes, rev.bytes().subspan(off, 8)));
        }
    }
}

TEST_CASE("attestation round trip, size, payload binding") {
    Rev rev = test_rev(7);
    Domain domain{1, 77};
    IdCommitment idc = id_commitment(rev, kZeroHash, domain);
    Bytes payload = to_bytes("canonical transfer payload for attestation tests");
    Attestation att = generate_attestation(rev, payload, domain, idc);

    auto enc = att.encode();
    CHECK(enc.size() == 104);
    auto dec = Attestation::decode(enc);
    REQUIRE(dec.has_value());
    CHECK(*dec == att);

    CHECK(verify_attestation_full(att, payload, rev) == AttestationCheck::Accept);

    // single byte flips anywhere in the payload break the binding
    std::mt19937_64 rng(123);
    for (int round = 0; round < 64; ++round) {
        Bytes mutated = payload;
        mutated[rng() % mutated.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        if (mutated == payload) continue;
        CHECK(verify_attestation_full(att, mutated, rev) == AttestationCheck::PayloadMismatch);
    }
}

TEST_CASE("attestation domain binding") {
    Rev rev = test_rev(8);
    Domain d1{3, 100};
    Domain d2{3, 101};
    IdCommitment idc = id_commitment(rev, kZeroHash, d1);
    Bytes payload = to_bytes("domain binding payload");
    Attestation att = generate_attestation(rev, payload, d1, idc);

    Attestation moved = att;
    moved.domain = d2;
    CHECK(verify_attestation_full(moved, payload, rev) == AttestationCheck::CredentialMismatch);
}

TEST_CASE("random credentials never verify") {
    Rev rev = test_rev(9);
    Domain domain{2, 5};
    IdCommitment idc = id_commitment(rev, kZeroHash, domain);
    Bytes payload = to_bytes("forgery target payload");
    Attestation att = generate_attestation(rev, payload, domain, idc);

    std::mt19937_64 rng(77);
    for (int i = 0; i < 10000; ++i) {
        Attestation forged = att;
        for (auto& b : forged.credential) b = static_cast<std::uint8_t>(rng());
        CHECK(verify_attestation_full(forged, payload, rev) ==
              AttestationCheck::CredentialMismatch);
    }
}

TEST_CASE("argon2id rev encapsulation is deterministic and salt-sensitive") {
    std::array<std::uint8_t, 16> salt{};
    salt[0] = 1;
    Rev a = encapsulate_rev("passphrase", salt);
    Rev b = encapsulate_rev("passphrase", salt);
    CHECK(std::equal(a.bytes().begin(), a.bytes().end(), b.bytes().begin()));
    std::array<std::uint8_t, 16> salt2{};
    salt2[0] = 2;
    Rev c = encapsulate_rev("passphrase", salt2);
    CHECK(!std::equal(a.bytes().begin(), a.bytes().end(), c.bytes().begin()));
    Rev d = encapsulate_rev("other passphrase", salt);
    CHECK(!std::equal(a.bytes().begin(), a.bytes().end(), d.bytes().begin()));
}

TEST_CASE("serialized attestations never contain rev or derived key bytes") {
    std::mt19937_64 rng(31337);
    for (int round = 0; round < 50; ++round) {
        Rev rev = test_rev(50000 + round);
        Domain domain{1, 10 + static_cast<std::uint64_t>(round)};
        IdCommitment idc = id_commitment(rev, kZeroHash, domain);
        Bytes payload = random_bytes(rng, 100 + round);
        Attestation att = generate_attestation(rev, payload, domain, idc);
        auto enc = att.encode();
        DerivedKey attest_key = derive_attest_key(rev, domain);
        for (std::size_t off = 0; off + 8 <= 32; ++off) {
            CHECK(!contains_subsequence(enc, rev.bytes().subspan(off, 8)));
            CHECK(!contains_subsequence(enc, std::span(attest_key.bytes).subspan(off, 8)));
        }
    }
}
