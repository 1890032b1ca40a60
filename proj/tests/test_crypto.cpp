// Copyright 2026 The SEDG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <openssl/bn.h>
#include <openssl/sha.h>

#include <map>
#include <set>

#include "doctest.h"
#include "sedg/crypto.hpp"

using namespace sedg::crypto;

namespace {

// Independent SHA-256 from OpenSSL.
Digest oracle_sha256(ByteView data)
{
    Digest d;
    SHA256(data.data(), data.size(), d.bytes.data());
    return d;
}

mpz_class oracle_rfc3526_2048()
{
    BIGNUM* bn = BN_get_rfc3526_prime_2048(nullptr);
    char* hex = BN_bn2hex(bn);
    mpz_class v(hex, 16);
    OPENSSL_free(hex);
    BN_free(bn);
    return v;
}

// Square-and-multiply on machine words, for the small group.
unsigned long naive_pow(unsigned long b, unsigned long e, unsigned long m)
{
    unsigned long r = 1 % m;
    for (unsigned long i = 0; i < e; ++i) {
        r = (r * b) % m;
    }
    return r;
}

}  // namespace

TEST_CASE("sha256 of the empty string")
{
    CHECK(to_hex(hash(std::string_view{}).bytes) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("sha256 agrees with OpenSSL across lengths")
{
    Rng rng(3);
    for (std::size_t n : {0u, 1u, 55u, 56u, 63u, 64u, 65u, 1000u, 4096u}) {
        const Bytes data = rng.bytes(n);
        CHECK(hash(data) == oracle_sha256(data));
    }
    CHECK(to_hex(hash(std::string_view("abc")).bytes) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("aead round trip and tamper detection")
{
    Rng rng(9);
    SecretKey k;
    rng.fill(k.bytes);
    Nonce n;
    rng.fill(n);
    const Bytes msg = to_bytes("some data worth buying");
    const Ciphertext c = encrypt(k, msg, n);
    CHECK(c.body.size() == msg.size() + kTagSize);
    CHECK(decrypt(k, c) == msg);

    for (std::size_t i = 0; i < c.body.size(); ++i) {
        Ciphertext bad = c;
        bad.body[i] ^= 0x01;
        CHECK_THROWS_AS(decrypt(k, bad), AuthenticationFailure);
    }
    Ciphertext bad_nonce = c;
    bad_nonce.nonce[0] ^= 0x80;
    CHECK_THROWS_AS(decrypt(k, bad_nonce), AuthenticationFailure);

    SecretKey other = k;
    other.bytes[31] ^= 1;
    CHECK_THROWS_AS(decrypt(other, c), AuthenticationFailure);

    Ciphertext short_body = c;
    short_body.body.resize(kTagSize - 1);
    CHECK_THROWS_AS(decrypt(k, short_body), AuthenticationFailure);
}

TEST_CASE("signatures reject any changed byte")
{
    Rng rng(12);
    std::array<std::uint8_t, 32> seed{};
    rng.fill(seed);
    const SigningKeyPair kp = SigningKeyPair::from_seed(seed);
    const Bytes msg = to_bytes("signed message");
    const Signature sig = sign(kp.secret, msg);
    CHECK(verify(kp.public_key, msg, sig));

    for (std::size_t i = 0; i < msg.size(); ++i) {
        Bytes m = msg;
        m[i] ^= 0x20;
        CHECK_FALSE(verify(kp.public_key, m, sig));
    }
    for (std::size_t i = 0; i < sig.size(); ++i) {
        Signature s = sig;
        s[i] ^= 0x01;
        CHECK_FALSE(verify(kp.public_key, msg, s));
    }
    std::array<std::uint8_t, 32> seed2 = seed;
    seed2[0] ^= 1;
    CHECK_FALSE(verify(SigningKeyPair::from_seed(seed2).public_key, msg, sig));
}

TEST_CASE("canonical encoding")
{
    CHECK(canonical_encode({}) == Bytes{});
    CHECK(canonical_encode({to_bytes("ab")}) == Bytes{0, 0, 0, 2, 'a', 'b'});
    CHECK(canonical_encode({to_bytes(""), to_bytes("x")}) == Bytes{0, 0, 0, 0, 0, 0, 0, 1, 'x'});

    // Splitting the same characters differently never collides.
    const std::vector<std::vector<std::string>> splits = {
        {"abc"}, {"a", "bc"}, {"ab", "c"}, {"a", "b", "c"}, {"", "abc"}, {"abc", ""}, {"", "", "abc"}};
    std::set<Bytes> seen;
    for (const auto& parts : splits) {
        std::vector<Bytes> bs;
        for (const auto& p : parts) {
            bs.push_back(to_bytes(p));
        }
        CHECK(seen.insert(canonical_encode(bs)).second);
    }

    // Randomised: distinct lists give distinct encodings.
    Rng rng(77);
    std::map<Bytes, std::vector<Bytes>> by_encoding;
    for (int i = 0; i < 2000; ++i) {
        std::vector<Bytes> parts(rng.next() % 4);
        for (auto& p : parts) {
            p = rng.bytes(rng.next() % 4);
            for (auto& b : p) {
                b %= 3;
            }
        }
        auto [it, fresh] = by_encoding.emplace(canonical_encode(parts), parts);
        if (!fresh) {
            CHECK(it->second == parts);
        }
    }
}

TEST_CASE("hex")
{
    CHECK(to_hex(Bytes{0x00, 0xab, 0xff}) == "00abff");
    CHECK(from_hex("00abff") == Bytes{0x00, 0xab, 0xff});
    CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);
    CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);
    CHECK_THROWS_AS(from_hex("AB"), std::invalid_argument);
}

TEST_CASE("rng derivation is label separated and reproducible")
{
    CHECK(Rng::derive(5, "buyer").next() == Rng::derive(5, "buyer").next());
    CHECK(Rng::derive(5, "buyer").next() != Rng::derive(5, "seller").next());
    CHECK(Rng::derive(5, "buyer").next() != Rng::derive(6, "buyer").next());
}

//------------------------------------------------------------------------------

TEST_CASE("small group examples")
{
    const GroupRef g = GroupParams::test_group();
    CHECK(g->p == 23);
    CHECK(g->q == 11);
    CHECK(g->g == 2);
    const GroupElement gen = GroupElement::generator(g);
    CHECK(group_exp(gen, Scalar::make(g, 3)).value() == 8);
    CHECK(group_exp(GroupElement::make(g, 8), Scalar::make(g, 4)).value() == 2);
    CHECK(scalar_mul(Scalar::make(g, 3), Scalar::make(g, 4)).value() == 1);
    CHECK(scalar_inv(Scalar::make(g, 4)).value() == 3);
    // 2^11 = 1 mod 23.
    CHECK(group_exp(gen, mpz_class(11)).value() == 1);
}

TEST_CASE("subgroup membership matches a brute-force enumeration")
{
    const GroupRef g = GroupParams::test_group();
    std::set<unsigned long> subgroup;
    for (unsigned long e = 0; e < 11; ++e) {
        subgroup.insert(naive_pow(2, e, 23));
    }
    CHECK(subgroup.size() == 11);
    for (unsigned long v = 0; v < 30; ++v) {
        CHECK(in_subgroup(*g, mpz_class(v)) == (subgroup.count(v) == 1));
    }
    CHECK_THROWS_AS(GroupElement::make(g, 5), DomainError);  // 5 is a non-residue mod 23
    CHECK_THROWS_AS(GroupElement::make(g, 0), DomainError);
    CHECK_THROWS_AS(GroupElement::make(g, 23), DomainError);
}

TEST_CASE("exponentiation is a homomorphism on the small group")
{
    const GroupRef g = GroupParams::test_group();
    const GroupElement gen = GroupElement::generator(g);
    for (unsigned long a = 1; a < 11; ++a) {
        for (unsigned long b = 1; b < 11; ++b) {
            const Scalar sa = Scalar::make(g, a);
            const Scalar sb = Scalar::make(g, b);
            // (G^a)^b = G^(a*b mod q)
            CHECK(group_exp(group_exp(gen, sa), sb) == group_exp(gen, scalar_mul(sa, sb)));
            CHECK(group_exp(gen, sa).value() == naive_pow(2, a, 23));
        }
        // Inverse by brute force.
        unsigned long inv = 0;
        for (unsigned long c = 1; c < 11; ++c) {
            if ((a * c) % 11 == 1) {
                inv = c;
            }
        }
        CHECK(scalar_inv(Scalar::make(g, a)).value() == inv);
    }
}

TEST_CASE("blinding round trip on both groups")
{
    Rng rng(5);
    for (const GroupRef& g : {GroupParams::test_group(), GroupParams::modp2048()}) {
        const GroupElement gen = GroupElement::generator(g);
        for (int i = 0; i < 5; ++i) {
            const Scalar k = Scalar::random(g, rng);
            const Scalar r = Scalar::random(g, rng);
            const GroupElement h2 = group_exp(gen, k);
            const GroupElement c = group_exp(h2, r);
            const Scalar x = scalar_mul(k, r);
            CHECK(group_exp(gen, x) == c);
            CHECK(scalar_mul(x, scalar_inv(r)) == k);
        }
    }
}

TEST_CASE("scalar ranges")
{
    const GroupRef g = GroupParams::test_group();
    CHECK_THROWS_AS(Scalar::make(g, 0), DomainError);
    CHECK_THROWS_AS(Scalar::make(g, 11), DomainError);
    Rng rng(1);
    std::set<unsigned long> drawn;
    for (int i = 0; i < 400; ++i) {
        const unsigned long v = Scalar::random(g, rng).value().get_ui();
        CHECK(v >= 1);
        CHECK(v <= 10);
        drawn.insert(v);
    }
    CHECK(drawn.size() == 10);

    SecretKey zero{};
    CHECK_THROWS_AS(Scalar::from_key(g, zero), DomainError);
    SecretKey eleven{};
    eleven.bytes[31] = 11;
    CHECK_THROWS_AS(Scalar::from_key(g, eleven), DomainError);
    SecretKey twelve{};
    twelve.bytes[31] = 12;
    CHECK(Scalar::from_key(g, twelve).value() == 1);
}

TEST_CASE("modp2048 parameters")
{
    const GroupRef g = GroupParams::modp2048();
    CHECK(g->p == oracle_rfc3526_2048());
    CHECK(mpz_sizeinbase(g->p.get_mpz_t(), 2) == 2048);
    CHECK(mpz_probab_prime_p(g->p.get_mpz_t(), 30) > 0);
    CHECK(mpz_probab_prime_p(g->q.get_mpz_t(), 30) > 0);
    CHECK(g->q == (g->p - 1) / 2);
    CHECK(g->g == 4);
    CHECK_NOTHROW(g->validate());
    CHECK(g->element_bytes() == 256);
    CHECK(GroupElement::generator(g).to_bytes().size() == 256);
}

TEST_CASE("group parameter validation")
{
    CHECK_THROWS_AS(GroupParams::make(23, 11, 5), DomainError);   // order 22
    CHECK_THROWS_AS(GroupParams::make(23, 7, 2), DomainError);    // 7 does not divide 22
    CHECK_THROWS_AS(GroupParams::make(23, 11, 1), DomainError);
    CHECK_THROWS_AS(GroupParams::named("nope"), std::invalid_argument);
}

TEST_CASE("decimal conversion")
{
    CHECK(to_decimal(mpz_class(1234)) == "1234");
    CHECK(from_decimal("1234") == 1234);
    CHECK(from_decimal("0") == 0);
    CHECK_THROWS_AS(from_decimal(""), std::invalid_argument);
    CHECK_THROWS_AS(from_decimal("012"), std::invalid_argument);
    CHECK_THROWS_AS(from_decimal("-3"), std::invalid_argument);
    CHECK_THROWS_AS(from_decimal("1e3"), std::invalid_argument);
    CHECK(to_fixed_bytes(mpz_class(258), 4) == Bytes{0, 0, 1, 2});
}
