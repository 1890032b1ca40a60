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

namespace sedg::crypto {

namespace {

// RFC 3526, group 14.
constexpr const char* kModp2048Hex =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

}  // namespace

Bytes to_fixed_bytes(const mpz_class& v, std::size_t width)
{
    Bytes out(width, 0);
    std::size_t count = 0;
    // mpz_export writes the minimal big-endian form; right-align it.
    Bytes tmp((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8 + 1);
    mpz_export(tmp.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    if (count > width) {
        throw DomainError("value does not fit the fixed encoding width");
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(count),
              out.begin() + static_cast<std::ptrdiff_t>(width - count));
    return out;
}

namespace {

mpz_class import_be(ByteView be)
{
    mpz_class v;
    if (!be.empty()) {
        mpz_import(v.get_mpz_t(), be.size(), 1, 1, 1, 0, be.data());
    }
    return v;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp, const mpz_class& mod)
{
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

}  // namespace

void GroupParams::validate() const
{
    if (p <= 3 || q <= 1) {
        throw DomainError("group: modulus or order too small");
    }
    if ((p - 1) % q != 0) {
        throw DomainError("group: q does not divide p-1");
    }
    if (g <= 1 || g >= p) {
        throw DomainError("group: generator out of range");
    }
    if (powm(g, q, p) != 1) {
        throw DomainError("group: generator order does not divide q");
    }
}

std::size_t GroupParams::element_bytes() const
{
    return (mpz_sizeinbase(p.get_mpz_t(), 2) + 7) / 8;
}

std::size_t GroupParams::scalar_bytes() const
{
    return (mpz_sizeinbase(q.get_mpz_t(), 2) + 7) / 8;
}

GroupRef GroupParams::make(mpz_class p, mpz_class q, mpz_class g, std::string name)
{
    auto params = std::make_shared<GroupParams>();
    params->p = std::move(p);
    params->q = std::move(q);
    params->g = std::move(g);
    params->name = std::move(name);
    params->validate();
    return params;
}

GroupRef GroupParams::test_group()
{
    static const GroupRef group = make(23, 11, 2, "test");
    return group;
}

GroupRef GroupParams::modp2048()
{
    static const GroupRef group = [] {
        mpz_class p(kModp2048Hex, 16);
        mpz_class q = (p - 1) / 2;
        return make(p, q, 4, "modp2048");
    }();
    return group;
}

GroupRef GroupParams::named(std::string_view name)
{
    if (name == "test") {
        return test_group();
    }
    if (name == "modp2048") {
        return modp2048();
    }
    throw std::invalid_argument("unknown group: " + std::string(name));
}

//------------------------------------------------------------------------------

bool in_subgroup(const GroupParams& params, const mpz_class& value)
{
    if (value < 1 || value >= params.p) {
        return false;
    }
    return powm(value, params.q, params.p) == 1;
}

GroupElement GroupElement::make(GroupRef params, mpz_class value)
{
    if (!in_subgroup(*params, value)) {
        throw DomainError("group element outside the order-q subgroup");
    }
    return GroupElement(std::move(params), std::move(value));
}

GroupElement GroupElement::generator(GroupRef params)
{
    mpz_class g = params->g;
    return GroupElement(std::move(params), std::move(g));
}

GroupElement GroupElement::from_bytes(GroupRef params, ByteView be)
{
    if (be.size() != params->element_bytes()) {
        throw DomainError("group element: wrong encoding width");
    }
    return make(std::move(params), import_be(be));
}

Bytes GroupElement::to_bytes() const
{
    return to_fixed_bytes(value_, params_->element_bytes());
}

Scalar Scalar::make(GroupRef params, mpz_class value)
{
    if (value <= 0 || value >= params->q) {
        throw DomainError("scalar outside [1, q-1]");
    }
    return Scalar(std::move(params), std::move(value));
}

Scalar Scalar::from_key(GroupRef params, const SecretKey& key)
{
    mpz_class v = import_be(key.bytes) % params->q;
    if (v == 0) {
        throw DomainError("key reduces to the zero scalar");
    }
    return Scalar(std::move(params), std::move(v));
}

Scalar Scalar::random(GroupRef params, Rng& rng)
{
    const std::size_t bits = mpz_sizeinbase(params->q.get_mpz_t(), 2);
    const std::size_t nbytes = (bits + 7) / 8;
    const unsigned top_bits = static_cast<unsigned>(bits - 8 * (nbytes - 1));
    const auto top_mask = static_cast<std::uint8_t>((1u << top_bits) - 1u);
    Bytes buf(nbytes);
    for (;;) {
        rng.fill(buf);
        buf[0] &= top_mask;
        mpz_class v = import_be(buf);
        if (v >= 1 && v < params->q) {
            return Scalar(std::move(params), std::move(v));
        }
    }
}

Bytes Scalar::to_bytes() const
{
    return to_fixed_bytes(value_, params_->scalar_bytes());
}

GroupElement group_exp(const GroupElement& base, const mpz_class& exponent)
{
    const GroupParams& params = *base.params();
    if (exponent < 0) {
        throw DomainError("negative exponent");
    }
    if (!in_subgroup(params, base.value())) {
        throw DomainError("base outside the order-q subgroup");
    }
    return GroupElement(base.params(), powm(base.value(), exponent, params.p));
}

GroupElement group_exp(const GroupElement& base, const Scalar& exponent)
{
    if (!(*base.params() == *exponent.params())) {
        throw DomainError("base and exponent belong to different groups");
    }
    return group_exp(base, exponent.value());
}

Scalar scalar_mul(const Scalar& a, const Scalar& b)
{
    const mpz_class& q = a.params()->q;
    // q is prime and both operands are nonzero, so the product is nonzero.
    return Scalar::make(a.params(), (a.value() * b.value()) % q);
}

Scalar scalar_inv(const Scalar& a)
{
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), a.value().get_mpz_t(), a.params()->q.get_mpz_t()) == 0) {
        throw DomainError("scalar not invertible");
    }
    return Scalar::make(a.params(), inv);
}

SecretKey dlog_kdf(const Scalar& k)
{
    const Digest d = hash(canonical_encode({to_bytes("sedg3-kdf"), k.to_bytes()}));
    SecretKey key;
    key.bytes = d.bytes;
    return key;
}

std::string to_decimal(const mpz_class& v)
{
    return v.get_str(10);
}

mpz_class from_decimal(std::string_view s)
{
    if (s.empty() || (s.size() > 1 && s[0] == '0')) {
        throw std::invalid_argument("decimal: empty or leading zero");
    }
    for (char ch : s) {
        if (ch < '0' || ch > '9') {
            throw std::invalid_argument("decimal: non-digit character");
        }
    }
    return mpz_class(std::string(s), 10);
}

}  // namespace sedg::crypto
