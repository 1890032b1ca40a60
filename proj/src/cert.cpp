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

#include "sedg/cert.hpp"

namespace sedg::cert {

using crypto::Digest;
using crypto::SecretKey;

PartyId PartyId::named(std::string_view name, std::optional<crypto::PublicKey> public_key)
{
    if (name.empty() || name.size() > kMaxPartyIdBytes) {
        throw std::invalid_argument("party id must be 1.." + std::to_string(kMaxPartyIdBytes) +
                                    " bytes");
    }
    return PartyId{crypto::to_bytes(name), public_key};
}

std::string_view variant_tag(Variant v)
{
    switch (v) {
    case Variant::V1: return "sedg1";
    case Variant::V2: return "sedg2";
    case Variant::V3: return "sedg3";
    }
    return "?";
}

std::string_view variant_name(Variant v)
{
    switch (v) {
    case Variant::V1: return "v1";
    case Variant::V2: return "v2";
    case Variant::V3: return "v3";
    }
    return "?";
}

Variant parse_variant(std::string_view s)
{
    for (Variant v : {Variant::V1, Variant::V2, Variant::V3}) {
        if (s == variant_tag(v) || s == variant_name(v)) {
            return v;
        }
    }
    throw std::invalid_argument("unknown protocol variant: " + std::string(s));
}

Variant commitment_variant(const Commitment2& h2)
{
    switch (h2.index()) {
    case 0: return Variant::V1;
    case 1: return Variant::V2;
    default: return Variant::V3;
    }
}

Bytes encode_commitment(const Commitment2& h2)
{
    if (const auto* c = std::get_if<commit::HashOfKey>(&h2)) {
        return crypto::to_bytes(c->digest.bytes);
    }
    if (const auto* c = std::get_if<commit::HashOfKeyAndNotary>(&h2)) {
        return crypto::to_bytes(c->digest.bytes);
    }
    const auto& e = std::get<commit::GroupPower>(h2).element;
    const auto& g = *e.params();
    const std::size_t w = g.element_bytes();
    auto fixed = [w](const mpz_class& v) { return crypto::to_fixed_bytes(v, w); };
    return crypto::canonical_encode({fixed(g.p), fixed(g.q), fixed(g.g), e.to_bytes()});
}

bool commitment_opens(const Commitment2& h2, const SecretKey& key, const PartyId& notary)
{
    if (const auto* c = std::get_if<commit::HashOfKey>(&h2)) {
        return crypto::hash(key.view()) == c->digest;
    }
    if (const auto* c = std::get_if<commit::HashOfKeyAndNotary>(&h2)) {
        return crypto::hash(crypto::canonical_encode({crypto::to_bytes(key.bytes), notary.id})) ==
               c->digest;
    }
    const auto& e = std::get<commit::GroupPower>(h2).element;
    try {
        const auto k = crypto::Scalar::from_key(e.params(), key);
        return crypto::group_exp(crypto::GroupElement::generator(e.params()), k) == e;
    } catch (const crypto::DomainError&) {
        return false;
    }
}

Bytes Certificate::signed_message() const
{
    return crypto::canonical_encode({crypto::to_bytes(variant_tag(variant)),
                                     crypto::to_bytes(h1.bytes), encode_commitment(h2),
                                     seller_id.id});
}

bool Certificate::operator==(const Certificate& o) const
{
    const bool groups_equal = (!group && !o.group) || (group && o.group && *group == *o.group);
    return variant == o.variant && h1 == o.h1 && h2 == o.h2 && seller_id == o.seller_id &&
           notary_id == o.notary_id && sigma == o.sigma && groups_equal;
}

SecretKey encryption_key(const CertificatePackage& pkg)
{
    if (pkg.certificate.variant == Variant::V3) {
        return crypto::dlog_kdf(crypto::Scalar::from_key(pkg.certificate.group, pkg.key));
    }
    return pkg.key;
}

//------------------------------------------------------------------------------

bool validate_data(const SellerData& data, const DataValidator& validator)
{
    if (validator) {
        return validator(data);
    }
    return !data.payload.empty();
}

Notary Notary::create(std::string_view name, crypto::Rng& rng)
{
    std::array<std::uint8_t, 32> seed{};
    rng.fill(seed);
    return Notary{crypto::SigningKeyPair::from_seed(seed), PartyId::named(name)};
}

CertificatePackage notarize(const Notary& notary, const SellerData& data, Variant variant,
                            const crypto::GroupRef& group, crypto::Rng& rng,
                            const NotarizeOptions& options)
{
    if (!validate_data(data, options.validator)) {
        throw ValidationRejected();
    }
    if (variant == Variant::V3 && !group) {
        throw std::invalid_argument("notarize: the discrete-log variant needs group parameters");
    }

    CertificatePackage pkg;
    Certificate& cert = pkg.certificate;
    cert.variant = variant;
    cert.seller_id = data.seller;
    cert.notary_id = PartyId{notary.id.id, notary.keys.public_key};

    std::optional<crypto::Scalar> scalar;
    for (;;) {
        if (options.fixed_key) {
            pkg.key = *options.fixed_key;
        } else {
            rng.fill(pkg.key.bytes);
        }
        if (variant != Variant::V3) {
            break;
        }
        try {
            scalar = crypto::Scalar::from_key(group, pkg.key);
            break;
        } catch (const crypto::DomainError&) {
            if (options.fixed_key) {
                throw;
            }
        }
    }

    crypto::Nonce nonce{};
    rng.fill(nonce);
    const SecretKey enc_key = scalar ? crypto::dlog_kdf(*scalar) : pkg.key;
    pkg.ciphertext = crypto::encrypt(enc_key, data.payload, nonce);
    cert.h1 = crypto::hash(pkg.ciphertext.encode());

    switch (variant) {
    case Variant::V1:
        cert.h2 = commit::HashOfKey{crypto::hash(pkg.key.view())};
        break;
    case Variant::V2:
        cert.h2 = commit::HashOfKeyAndNotary{
            crypto::hash(crypto::canonical_encode({crypto::to_bytes(pkg.key.bytes), notary.id.id}))};
        break;
    case Variant::V3:
        cert.group = group;
        cert.h2 = commit::GroupPower{
            crypto::group_exp(crypto::GroupElement::generator(group), *scalar)};
        break;
    }

    cert.sigma = crypto::sign(notary.keys.secret, cert.signed_message());
    return pkg;
}

//------------------------------------------------------------------------------

std::optional<crypto::PublicKey> TrustRegistry::find(const PartyId& notary) const
{
    auto it = keys_.find(notary.id);
    if (it == keys_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string_view to_string(VerifyFailure f)
{
    switch (f) {
    case VerifyFailure::None: return "none";
    case VerifyFailure::UnknownNotary: return "UnknownNotary";
    case VerifyFailure::BadSignature: return "BadSignature";
    case VerifyFailure::CiphertextMismatch: return "CiphertextMismatch";
    case VerifyFailure::SellerMismatch: return "SellerMismatch";
    }
    return "?";
}

VerifyResult verify_certificate(const Certificate& cert, const TrustRegistry& trusted,
                                const PartyId& claimed_seller, const crypto::Ciphertext& ciphertext)
{
    const auto key = trusted.find(cert.notary_id);
    if (!key) {
        return {VerifyFailure::UnknownNotary};
    }
    if (commitment_variant(cert.h2) != cert.variant ||
        (cert.variant == Variant::V3) != static_cast<bool>(cert.group) ||
        !crypto::verify(*key, cert.signed_message(), cert.sigma)) {
        return {VerifyFailure::BadSignature};
    }
    if (cert.variant == Variant::V3 &&
        !(*std::get<commit::GroupPower>(cert.h2).element.params() == *cert.group)) {
        return {VerifyFailure::BadSignature};
    }
    if (crypto::hash(ciphertext.encode()) != cert.h1) {
        return {VerifyFailure::CiphertextMismatch};
    }
    if (!(cert.seller_id == claimed_seller)) {
        return {VerifyFailure::SellerMismatch};
    }
    return {};
}

}  // namespace sedg::cert
