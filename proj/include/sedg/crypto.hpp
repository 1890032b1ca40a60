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

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace sedg::crypto {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

struct Digest
{
    std::array<std::uint8_t, 32> bytes{};

    ByteView view() const { return bytes; }
    auto operator<=>(const Digest&) const = default;
};

struct SecretKey
{
    std::array<std::uint8_t, 32> bytes{};

    ByteView view() const { return bytes; }
    auto operator<=>(const SecretKey&) const = default;
};

using Nonce = std::array<std::uint8_t, 12>;
using Signature = std::array<std::uint8_t, 64>;
using PublicKey = std::array<std::uint8_t, 32>;

inline constexpr std::size_t kTagSize = 16;

// Authenticated ciphertext. The body carries the payload followed by the tag.
struct Ciphertext
{
    Nonce nonce{};
    Bytes body;

    // nonce || body; this is what the h1 commitment hashes.
    Bytes encode() const;
    bool operator==(const Ciphertext&) const = default;
};

struct SigningKeyPair
{
    std::array<std::uint8_t, 32> secret{};  // seed
    PublicKey public_key{};

    static SigningKeyPair from_seed(const std::array<std::uint8_t, 32>& seed);
};

class AuthenticationFailure : public std::runtime_error
{
public:
    AuthenticationFailure() : std::runtime_error("authentication failure") {}
};

class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

//------------------------------------------------------------------------------
// Deterministic randomness for simulation runs. Not a CSPRNG.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    void fill(std::span<std::uint8_t> out);
    Bytes bytes(std::size_t n);

    // Child generator whose stream depends on this generator's seed and label
    // but not on how many draws were made from it.
    static Rng derive(std::uint64_t seed, std::string_view label);

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

//------------------------------------------------------------------------------
Digest hash(ByteView data);
inline Digest hash(std::string_view s)
{
    return hash(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Ciphertext encrypt(const SecretKey& key, ByteView plaintext, const Nonce& nonce);
Bytes decrypt(const SecretKey& key, const Ciphertext& c);

Signature sign(const std::array<std::uint8_t, 32>& secret, ByteView message);
bool verify(const PublicKey& public_key, ByteView message, const Signature& sig);

// Each part as a 4-byte big-endian length followed by its bytes.
Bytes canonical_encode(std::span<const Bytes> parts);
Bytes canonical_encode(std::initializer_list<Bytes> parts);

Bytes to_bytes(std::string_view s);
template <std::size_t N>
Bytes to_bytes(const std::array<std::uint8_t, N>& a)
{
    return Bytes(a.begin(), a.end());
}

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);  // throws std::invalid_argument
template <std::size_t N>
std::array<std::uint8_t, N> from_hex_fixed(std::string_view hex)
{
    const Bytes b = from_hex(hex);
    if (b.size() != N) {
        throw std::invalid_argument("hex: expected " + std::to_string(N) + " bytes");
    }
    std::array<std::uint8_t, N> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

//------------------------------------------------------------------------------
// Prime-order subgroup of Z_p^*.

struct GroupParams
{
    mpz_class p;
    mpz_class q;
    mpz_class g;
    std::string name;

    // q | p-1, 1 < g < p, g^q = 1 mod p. Throws DomainError.
    void validate() const;

    std::size_t element_bytes() const;
    std::size_t scalar_bytes() const;

    bool operator==(const GroupParams& o) const { return p == o.p && q == o.q && g == o.g; }

    static std::shared_ptr<const GroupParams> make(mpz_class p, mpz_class q, mpz_class g,
                                                   std::string name = "custom");
    // p = 23, q = 11, G = 2.
    static std::shared_ptr<const GroupParams> test_group();
    // RFC 3526 2048-bit MODP prime, q = (p-1)/2, G = 4.
    static std::shared_ptr<const GroupParams> modp2048();
    // "test" or "modp2048"; throws std::invalid_argument otherwise.
    static std::shared_ptr<const GroupParams> named(std::string_view name);
};

using GroupRef = std::shared_ptr<const GroupParams>;

class GroupElement
{
public:
    // Validates range and subgroup membership.
    static GroupElement make(GroupRef params, mpz_class value);
    static GroupElement generator(GroupRef params);
    static GroupElement from_bytes(GroupRef params, ByteView be);

    const mpz_class& value() const { return value_; }
    const GroupRef& params() const { return params_; }
    // Fixed width big-endian, element_bytes() long.
    Bytes to_bytes() const;

    bool operator==(const GroupElement& o) const
    {
        return value_ == o.value_ && *params_ == *o.params_;
    }

private:
    GroupElement(GroupRef params, mpz_class value)
        : params_(std::move(params)), value_(std::move(value))
    {
    }
    friend GroupElement group_exp(const GroupElement&, const mpz_class&);

    GroupRef params_;
    mpz_class value_;
};

class Scalar
{
public:
    // Requires 0 < value < q.
    static Scalar make(GroupRef params, mpz_class value);
    // Big-endian interpretation of |key| reduced mod q; DomainError if zero.
    static Scalar from_key(GroupRef params, const SecretKey& key);
    // Uniform in [1, q-1] by rejection sampling.
    static Scalar random(GroupRef params, Rng& rng);

    const mpz_class& value() const { return value_; }
    const GroupRef& params() const { return params_; }
    Bytes to_bytes() const;

    bool operator==(const Scalar& o) const { return value_ == o.value_ && *params_ == *o.params_; }

private:
    Scalar(GroupRef params, mpz_class value) : params_(std::move(params)), value_(std::move(value)) {}

    GroupRef params_;
    mpz_class value_;
};

bool in_subgroup(const GroupParams& params, const mpz_class& value);

// base^exponent mod p for any exponent >= 0. Throws DomainError if the base
// is outside the subgroup.
GroupElement group_exp(const GroupElement& base, const mpz_class& exponent);
GroupElement group_exp(const GroupElement& base, const Scalar& exponent);

Scalar scalar_mul(const Scalar& a, const Scalar& b);
Scalar scalar_inv(const Scalar& a);

// Symmetric key for the discrete-log variant, derived from the exponent.
SecretKey dlog_kdf(const Scalar& k);

// Right-aligned big-endian encoding of v in exactly |width| bytes.
Bytes to_fixed_bytes(const mpz_class& v, std::size_t width);

std::string to_decimal(const mpz_class& v);
mpz_class from_decimal(std::string_view s);  // throws std::invalid_argument

}  // namespace sedg::crypto
