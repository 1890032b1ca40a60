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

#include "sedg/crypto.hpp"

#include <sodium.h>

#include <cstring>

namespace sedg::crypto {

namespace {

void ensure_sodium()
{
    static const bool ready = [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialisation failed");
        }
        return true;
    }();
    (void)ready;
}

}  // namespace

Bytes Ciphertext::encode() const
{
    Bytes out;
    out.reserve(nonce.size() + body.size());
    out.insert(out.end(), nonce.begin(), nonce.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

SigningKeyPair SigningKeyPair::from_seed(const std::array<std::uint8_t, 32>& seed)
{
    ensure_sodium();
    SigningKeyPair kp;
    kp.secret = seed;
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> expanded{};
    crypto_sign_seed_keypair(kp.public_key.data(), expanded.data(), seed.data());
    sodium_memzero(expanded.data(), expanded.size());
    return kp;
}

//------------------------------------------------------------------------------

void Rng::fill(std::span<std::uint8_t> out)
{
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t w = engine_();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(w >> (8 * b));
        }
    }
}

Bytes Rng::bytes(std::size_t n)
{
    Bytes out(n);
    fill(out);
    return out;
}

Rng Rng::derive(std::uint64_t seed, std::string_view label)
{
    Bytes seed_bytes(8);
    for (int i = 0; i < 8; ++i) {
        seed_bytes[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
    }
    const Digest d = hash(canonical_encode({seed_bytes, to_bytes(label)}));
    std::uint64_t child = 0;
    for (int i = 0; i < 8; ++i) {
        child = (child << 8) | d.bytes[i];
    }
    return Rng(child);
}

//------------------------------------------------------------------------------

Digest hash(ByteView data)
{
    ensure_sodium();
    Digest d;
    crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
    return d;
}

Ciphertext encrypt(const SecretKey& key, ByteView plaintext, const Nonce& nonce)
{
    static_assert(crypto_aead_chacha20poly1305_ietf_NPUBBYTES == 12);
    static_assert(crypto_aead_chacha20poly1305_ietf_ABYTES == kTagSize);
    ensure_sodium();
    Ciphertext c;
    c.nonce = nonce;
    c.body.resize(plaintext.size() + kTagSize);
    unsigned long long written = 0;
    crypto_aead_chacha20poly1305_ietf_encrypt(c.body.data(), &written, plaintext.data(),
                                              plaintext.size(), nullptr, 0, nullptr,
                                              nonce.data(), key.bytes.data());
    c.body.resize(written);
    return c;
}

Bytes decrypt(const SecretKey& key, const Ciphertext& c)
{
    ensure_sodium();
    if (c.body.size() < kTagSize) {
        throw AuthenticationFailure();
    }
    Bytes out(c.body.size() - kTagSize);
    unsigned long long written = 0;
    if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &written, nullptr, c.body.data(),
                                                  c.body.size(), nullptr, 0, c.nonce.data(),
                                                  key.bytes.data()) != 0) {
        throw AuthenticationFailure();
    }
    out.resize(written);
    return out;
}

Signature sign(const std::array<std::uint8_t, 32>& secret, ByteView message)
{
    ensure_sodium();
    std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
    crypto_sign_seed_keypair(pk.data(), sk.data(), secret.data());
    Signature sig{};
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sk.data());
    sodium_memzero(sk.data(), sk.size());
    return sig;
}

bool verify(const PublicKey& public_key, ByteView message, const Signature& sig)
{
    ensure_sodium();
    return crypto_sign_verify_detached(sig.data(), message.data(), message.size(),
                                       public_key.data()) == 0;
}

Bytes canonical_encode(std::span<const Bytes> parts)
{
    std::size_t total = 0;
    for (const Bytes& p : parts) {
        if (p.size() > 0xffffffffu) {
            throw std::length_error("canonical_encode: part exceeds 2^32-1 bytes");
        }
        total += 4 + p.size();
    }
    Bytes out;
    out.reserve(total);
    for (const Bytes& p : parts) {
        const auto n = static_cast<std::uint32_t>(p.size());
        out.push_back(static_cast<std::uint8_t>(n >> 24));
        out.push_back(static_cast<std::uint8_t>(n >> 16));
        out.push_back(static_cast<std::uint8_t>(n >> 8));
        out.push_back(static_cast<std::uint8_t>(n));
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

Bytes canonical_encode(std::initializer_list<Bytes> parts)
{
    return canonical_encode(std::span<const Bytes>(parts.begin(), parts.size()));
}

Bytes to_bytes(std::string_view s)
{
    return Bytes(s.begin(), s.end());
}

std::string to_hex(ByteView data)
{
    std::string out(data.size() * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), data.data(), data.size());
    out.pop_back();
    return out;
}

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0) {
        throw std::invalid_argument("hex: odd length");
    }
    for (char ch : hex) {
        const bool ok = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f');
        if (!ok) {
            throw std::invalid_argument("hex: expected lowercase hex digits");
        }
    }
    Bytes out(hex.size() / 2);
    std::size_t len = 0;
    if (sodium_hex2bin(out.data(), out.size(), hex.data(), hex.size(), nullptr, &len, nullptr) != 0 ||
        len != out.size()) {
        throw std::invalid_argument("hex: malformed input");
    }
    return out;
}

}  // namespace sedg::crypto
