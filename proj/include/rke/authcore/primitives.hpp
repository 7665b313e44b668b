#pragma once

// Hash and block-cipher primitives. Both sit on OpenSSL's EVP layer.

#include <rke/common.hpp>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>
#include <memory>
#include <string_view>

namespace rke::auth {

using Digest = std::array<Byte, 32>;

/// AES-128 key; the live session key (rand_init) has this shape.
using SymmetricKey = Block;

namespace detail {

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

inline Bytes aes_ecb_raw(const SymmetricKey& key, ByteView in, bool encrypt) {
    CipherCtx ctx{EVP_CIPHER_CTX_new()};
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    if (EVP_CipherInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr, encrypt ? 1 : 0) != 1)
        throw std::runtime_error("AES init failed");
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    Bytes out(in.size() + 16);
    int len = 0;
    if (EVP_CipherUpdate(ctx.get(), out.data(), &len, in.data(), static_cast<int>(in.size())) != 1)
        throw std::runtime_error("AES update failed");
    int tail = 0;
    if (EVP_CipherFinal_ex(ctx.get(), out.data() + len, &tail) != 1) throw std::runtime_error("AES final failed");
    out.resize(static_cast<std::size_t>(len + tail));
    return out;
}

}  // namespace detail

inline Digest sha256(ByteView data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
        throw std::runtime_error("SHA-256 failed");
    return out;
}

inline Digest sha256(std::string_view text) {
    return sha256(ByteView{reinterpret_cast<const Byte*>(text.data()), text.size()});
}

inline Digest hmac_sha256(ByteView key, ByteView data) {
    Digest out{};
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len))
        throw std::runtime_error("HMAC-SHA-256 failed");
    return out;
}

/// Single-block AES-128 (the FIPS-197 primitive, no mode, no padding).
inline Block aes128_encrypt_block(const SymmetricKey& key, const Block& plaintext) {
    return to_array<16>(detail::aes_ecb_raw(key, plaintext, true));
}

inline Block aes128_decrypt_block(const SymmetricKey& key, const Block& ciphertext) {
    return to_array<16>(detail::aes_ecb_raw(key, ciphertext, false));
}

/// Deterministic AES-128-ECB. Block-aligned plaintexts are encrypted as-is; anything
/// else gets PKCS#7 padding. ECB is required because the receiver matches ciphertexts
/// for equality; it leaks equal blocks and offers no integrity.
inline Bytes sym_encrypt(const SymmetricKey& key, ByteView plaintext) {
    if (plaintext.empty()) throw InvalidArgument("sym_encrypt: empty plaintext");
    if (plaintext.size() % 16 == 0) return detail::aes_ecb_raw(key, plaintext, true);

    const std::size_t pad = 16 - plaintext.size() % 16;
    Bytes padded(plaintext.begin(), plaintext.end());
    padded.insert(padded.end(), pad, static_cast<Byte>(pad));
    return detail::aes_ecb_raw(key, padded, true);
}

/// Inverse of sym_encrypt for a plaintext of known length. For unaligned lengths the
/// PKCS#7 padding is checked, which is where a wrong key shows up as DecryptError.
/// Aligned plaintexts carry no redundancy: a wrong key yields garbage, not an error.
inline Bytes sym_decrypt(const SymmetricKey& key, ByteView ciphertext, std::size_t plaintext_size) {
    if (ciphertext.empty() || ciphertext.size() % 16 != 0)
        throw DecryptError("ciphertext length is not a positive multiple of 16");
    Bytes plain = detail::aes_ecb_raw(key, ciphertext, false);
    if (plaintext_size % 16 == 0) {
        if (plain.size() != plaintext_size) throw DecryptError("ciphertext length does not match plaintext size");
        return plain;
    }
    const std::size_t pad = 16 - plaintext_size % 16;
    if (plain.size() != plaintext_size + pad) throw DecryptError("ciphertext length does not match plaintext size");
    for (std::size_t i = plaintext_size; i < plain.size(); ++i)
        if (plain[i] != pad) throw DecryptError("bad PKCS#7 padding");
    plain.resize(plaintext_size);
    return plain;
}

/// The session key after a completed round is the vehicle's rand2, verbatim.
constexpr SymmetricKey rotate_session_key(const SymmetricKey& /*current*/, const Block& rand2) { return rand2; }

}  // namespace rke::auth
