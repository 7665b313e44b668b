#pragma once

// ECDSA over P-256 with SHA-256.
//
// Signing is done here on top of OpenSSL's bignum/point arithmetic with
// RFC 6979 deterministic nonces and low-s normalization, so identical inputs
// always produce identical signatures. Verification goes through OpenSSL's
// EVP interface, an independent code path from the signer.

#include <rke/authcore/primitives.hpp>
#include <rke/common.hpp>

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>

#include <array>
#include <memory>
#include <random>

namespace rke::auth {

using Scalar = std::array<Byte, 32>;
using CompressedPoint = std::array<Byte, 33>;
using Signature = std::array<Byte, 64>;  // r || s, big-endian

namespace detail {

struct BnDeleter {
    void operator()(BIGNUM* p) const { BN_free(p); }
};
struct BnCtxDeleter {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointDeleter {
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct GroupDeleter {
    void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};
struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct ParamBldDeleter {
    void operator()(OSSL_PARAM_BLD* p) const { OSSL_PARAM_BLD_free(p); }
};
struct ParamDeleter {
    void operator()(OSSL_PARAM* p) const { OSSL_PARAM_free(p); }
};
struct SigDeleter {
    void operator()(ECDSA_SIG* p) const { ECDSA_SIG_free(p); }
};

using Bn = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtx = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using Point = std::unique_ptr<EC_POINT, PointDeleter>;

inline void check(int ok, const char* what) {
    if (ok != 1) throw std::runtime_error(what);
}

inline const EC_GROUP* p256() {
    static const std::unique_ptr<EC_GROUP, GroupDeleter> group{EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)};
    return group.get();
}

inline const BIGNUM* order() { return EC_GROUP_get0_order(p256()); }

inline Bn new_bn() {
    Bn bn{BN_new()};
    if (!bn) throw std::bad_alloc();
    return bn;
}

inline Bn bn_from(ByteView bytes) {
    Bn bn{BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr)};
    if (!bn) throw std::bad_alloc();
    return bn;
}

inline Scalar bn_to_scalar(const BIGNUM* bn) {
    Scalar out{};
    check(BN_bn2binpad(bn, out.data(), static_cast<int>(out.size())) == static_cast<int>(out.size()) ? 1 : 0,
          "scalar does not fit 32 bytes");
    return out;
}

inline bool in_scalar_range(const BIGNUM* k) { return !BN_is_zero(k) && !BN_is_negative(k) && BN_cmp(k, order()) < 0; }

inline Bn half_order() {
    Bn half = new_bn();
    check(BN_rshift1(half.get(), order()), "BN_rshift1");
    return half;
}

}  // namespace detail

struct SigningKeypair {
    Scalar secret{};
    CompressedPoint public_key{};

    bool operator==(const SigningKeypair&) const = default;
};

inline CompressedPoint public_from_secret(const Scalar& secret) {
    using namespace detail;
    Bn d = bn_from(secret);
    if (!in_scalar_range(d.get())) throw InvalidArgument("secret scalar outside [1, n-1]");
    BnCtx ctx{BN_CTX_new()};
    Point q{EC_POINT_new(p256())};
    check(EC_POINT_mul(p256(), q.get(), d.get(), nullptr, nullptr, ctx.get()), "EC_POINT_mul");
    CompressedPoint out{};
    const auto len = EC_POINT_point2oct(p256(), q.get(), POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx.get());
    check(len == out.size() ? 1 : 0, "EC_POINT_point2oct");
    return out;
}

inline SigningKeypair keypair_from_secret(const Scalar& secret) { return {secret, public_from_secret(secret)}; }

/// Draws 32 bytes from `rng` and folds them into [1, n-1].
template <std::uniform_random_bit_generator Rng>
SigningKeypair generate_keypair(Rng& rng) {
    using namespace detail;
    static_assert(Rng::min() == 0 && Rng::max() >= 0xff, "generator must yield at least 8 random bits per call");
    Scalar raw{};
    for (auto& b : raw) b = static_cast<Byte>(rng() & 0xff);

    Bn x = bn_from(raw);
    Bn n_minus_1 = new_bn();
    check(BN_sub(n_minus_1.get(), order(), BN_value_one()), "BN_sub");
    BnCtx ctx{BN_CTX_new()};
    Bn d = new_bn();
    check(BN_nnmod(d.get(), x.get(), n_minus_1.get(), ctx.get()), "BN_nnmod");
    check(BN_add(d.get(), d.get(), BN_value_one()), "BN_add");
    return keypair_from_secret(bn_to_scalar(d.get()));
}

/// RFC 6979 section 3.2 nonce for P-256 / SHA-256 (qlen == hlen == 256).
inline Scalar rfc6979_nonce(const Scalar& secret, const Digest& h1) {
    using namespace detail;
    BnCtx ctx{BN_CTX_new()};

    // bits2octets(h1): reduce the hash modulo n.
    Bn z = bn_from(h1);
    if (BN_cmp(z.get(), order()) >= 0) check(BN_sub(z.get(), z.get(), order()), "BN_sub");
    const Scalar h1_octets = bn_to_scalar(z.get());

    Digest v{};
    v.fill(0x01);
    Digest k{};
    k.fill(0x00);

    auto hmac_k = [&](std::initializer_list<ByteView> parts) {
        Bytes buf;
        for (ByteView p : parts) buf.insert(buf.end(), p.begin(), p.end());
        return hmac_sha256(k, buf);
    };
    const Byte zero = 0x00;
    const Byte one = 0x01;

    k = hmac_k({v, ByteView{&zero, 1}, secret, h1_octets});
    v = hmac_sha256(k, v);
    k = hmac_k({v, ByteView{&one, 1}, secret, h1_octets});
    v = hmac_sha256(k, v);

    for (;;) {
        v = hmac_sha256(k, v);
        Bn candidate = bn_from(v);
        if (in_scalar_range(candidate.get())) return bn_to_scalar(candidate.get());
        k = hmac_k({v, ByteView{&zero, 1}});
        v = hmac_sha256(k, v);
    }
}

inline Signature sign_digest(const Scalar& secret, const Digest& digest) {
    using namespace detail;
    BnCtx ctx{BN_CTX_new()};
    Bn d = bn_from(secret);
    if (!in_scalar_range(d.get())) throw InvalidArgument("secret scalar outside [1, n-1]");
    Bn e = bn_from(digest);
    Bn k = bn_from(rfc6979_nonce(secret, digest));

    // r = x(kG) mod n. The RFC 6979 retry on r == 0 or s == 0 has probability ~2^-256; not handled.
    Point kg{EC_POINT_new(p256())};
    check(EC_POINT_mul(p256(), kg.get(), k.get(), nullptr, nullptr, ctx.get()), "EC_POINT_mul");
    Bn x = new_bn();
    check(EC_POINT_get_affine_coordinates(p256(), kg.get(), x.get(), nullptr, ctx.get()), "affine coordinates");
    Bn r = new_bn();
    check(BN_nnmod(r.get(), x.get(), order(), ctx.get()), "BN_nnmod");

    // s = k^-1 (e + r d) mod n
    Bn rd = new_bn();
    check(BN_mod_mul(rd.get(), r.get(), d.get(), order(), ctx.get()), "BN_mod_mul");
    Bn sum = new_bn();
    check(BN_mod_add(sum.get(), e.get(), rd.get(), order(), ctx.get()), "BN_mod_add");
    Bn k_inv{BN_mod_inverse(nullptr, k.get(), order(), ctx.get())};
    if (!k_inv) throw std::runtime_error("BN_mod_inverse");
    Bn s = new_bn();
    check(BN_mod_mul(s.get(), k_inv.get(), sum.get(), order(), ctx.get()), "BN_mod_mul");

    Bn half = half_order();
    if (BN_cmp(s.get(), half.get()) > 0) check(BN_sub(s.get(), order(), s.get()), "BN_sub");

    Signature sig{};
    const Scalar rb = bn_to_scalar(r.get());
    const Scalar sb = bn_to_scalar(s.get());
    std::copy(rb.begin(), rb.end(), sig.begin());
    std::copy(sb.begin(), sb.end(), sig.begin() + 32);
    return sig;
}

inline Signature sign(const Scalar& secret, ByteView message) { return sign_digest(secret, sha256(message)); }

/// Throws DecodeError when `encoded` is not a point on P-256.
inline void validate_public_key(const CompressedPoint& encoded) {
    using namespace detail;
    BnCtx ctx{BN_CTX_new()};
    Point q{EC_POINT_new(p256())};
    if (EC_POINT_oct2point(p256(), q.get(), encoded.data(), encoded.size(), ctx.get()) != 1)
        throw DecodeError("public key is not a valid compressed P-256 point");
}

/// True iff `sig` is a low-s ECDSA signature of SHA-256(message) under `public_key`.
/// A public key that does not decode is a DecodeError, not a false verdict.
inline bool verify(const CompressedPoint& public_key, ByteView message, const Signature& sig) {
    using namespace detail;
    validate_public_key(public_key);

    Bn r = bn_from(ByteView{sig.data(), 32});
    Bn s = bn_from(ByteView{sig.data() + 32, 32});
    if (!in_scalar_range(r.get()) || !in_scalar_range(s.get())) return false;
    Bn half = half_order();
    if (BN_cmp(s.get(), half.get()) > 0) return false;

    std::unique_ptr<OSSL_PARAM_BLD, ParamBldDeleter> bld{OSSL_PARAM_BLD_new()};
    check(OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0), "param group");
    check(OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, public_key.data(), public_key.size()),
          "param pub");
    std::unique_ptr<OSSL_PARAM, ParamDeleter> params{OSSL_PARAM_BLD_to_param(bld.get())};
    std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> kctx{EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr)};
    check(EVP_PKEY_fromdata_init(kctx.get()), "EVP_PKEY_fromdata_init");
    EVP_PKEY* raw_key = nullptr;
    if (EVP_PKEY_fromdata(kctx.get(), &raw_key, EVP_PKEY_PUBLIC_KEY, params.get()) != 1)
        throw DecodeError("public key rejected by EVP_PKEY_fromdata");
    std::unique_ptr<EVP_PKEY, PkeyDeleter> pkey{raw_key};

    std::unique_ptr<ECDSA_SIG, SigDeleter> esig{ECDSA_SIG_new()};
    check(ECDSA_SIG_set0(esig.get(), r.release(), s.release()), "ECDSA_SIG_set0");
    unsigned char* der = nullptr;
    const int der_len = i2d_ECDSA_SIG(esig.get(), &der);
    if (der_len <= 0) throw std::runtime_error("i2d_ECDSA_SIG");
    Bytes der_sig(der, der + der_len);
    OPENSSL_free(der);

    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> md{EVP_MD_CTX_new()};
    check(EVP_DigestVerifyInit(md.get(), nullptr, EVP_sha256(), nullptr, pkey.get()), "EVP_DigestVerifyInit");
    return EVP_DigestVerify(md.get(), der_sig.data(), der_sig.size(), message.data(), message.size()) == 1;
}

}  // namespace rke::auth
