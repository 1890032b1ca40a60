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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "sedg/crypto.hpp"

namespace sedg::cert {

using crypto::Bytes;

struct PartyId
{
    Bytes id;
    std::optional<crypto::PublicKey> public_key;

    // Throws std::invalid_argument for an empty or oversized id.
    static PartyId named(std::string_view name,
                         std::optional<crypto::PublicKey> public_key = std::nullopt);
    std::string display() const { return std::string(id.begin(), id.end()); }

    // Identity is the handle; the key is looked up through a registry.
    bool operator==(const PartyId& o) const { return id == o.id; }
};

inline constexpr std::size_t kMaxPartyIdBytes = 64;

struct SellerData
{
    Bytes payload;
    PartyId seller;
    std::string meta;
};

enum class Variant { V1, V2, V3 };

std::string_view variant_tag(Variant v);     // "sedg1" ...
std::string_view variant_name(Variant v);    // "v1" ...
Variant parse_variant(std::string_view s);   // accepts either form

namespace commit {
struct HashOfKey
{
    crypto::Digest digest;
    bool operator==(const HashOfKey&) const = default;
};
struct HashOfKeyAndNotary
{
    crypto::Digest digest;
    bool operator==(const HashOfKeyAndNotary&) const = default;
};
struct GroupPower
{
    crypto::GroupElement element;
    bool operator==(const GroupPower&) const = default;
};
}  // namespace commit

// The key commitment h2, one form per protocol variant.
using Commitment2 = std::variant<commit::HashOfKey, commit::HashOfKeyAndNotary, commit::GroupPower>;

Variant commitment_variant(const Commitment2& h2);
// Bytes that enter the signature. GroupPower binds (p, q, G, value).
Bytes encode_commitment(const Commitment2& h2);
// Whether |key| opens |h2| for the given notary.
bool commitment_opens(const Commitment2& h2, const crypto::SecretKey& key, const PartyId& notary);

struct Certificate
{
    Variant variant = Variant::V1;
    crypto::Digest h1;
    Commitment2 h2;
    PartyId seller_id;
    PartyId notary_id;
    crypto::Signature sigma{};
    crypto::GroupRef group;  // set for V3 only

    // canonical_encode([variant tag, h1, encode(h2), seller id])
    Bytes signed_message() const;

    bool operator==(const Certificate& o) const;
};

struct CertificatePackage
{
    crypto::SecretKey key;
    crypto::Ciphertext ciphertext;
    Certificate certificate;
};

// Symmetric key used for E_k: the raw key in V1/V2, the KDF of scalar(k) in V3.
crypto::SecretKey encryption_key(const CertificatePackage& pkg);

//------------------------------------------------------------------------------

using DataValidator = std::function<bool(const SellerData&)>;

bool validate_data(const SellerData& data, const DataValidator& validator = {});

class ValidationRejected : public std::runtime_error
{
public:
    ValidationRejected() : std::runtime_error("seller data rejected by notary validation") {}
};

struct NotarizeOptions
{
    DataValidator validator;
    // Test hook: use this key instead of drawing one.
    std::optional<crypto::SecretKey> fixed_key;
};

struct Notary
{
    crypto::SigningKeyPair keys;
    PartyId id;

    static Notary create(std::string_view name, crypto::Rng& rng);
};

CertificatePackage notarize(const Notary& notary, const SellerData& data, Variant variant,
                            const crypto::GroupRef& group, crypto::Rng& rng,
                            const NotarizeOptions& options = {});

//------------------------------------------------------------------------------

class TrustRegistry
{
public:
    void add(const PartyId& notary, const crypto::PublicKey& key) { keys_[notary.id] = key; }
    std::optional<crypto::PublicKey> find(const PartyId& notary) const;
    bool empty() const { return keys_.empty(); }

private:
    std::map<Bytes, crypto::PublicKey> keys_;
};

enum class VerifyFailure { None, UnknownNotary, BadSignature, CiphertextMismatch, SellerMismatch };

std::string_view to_string(VerifyFailure f);

struct VerifyResult
{
    VerifyFailure failure = VerifyFailure::None;
    explicit operator bool() const { return failure == VerifyFailure::None; }
};

VerifyResult verify_certificate(const Certificate& cert, const TrustRegistry& trusted,
                                const PartyId& claimed_seller,
                                const crypto::Ciphertext& ciphertext);

}  // namespace sedg::cert
