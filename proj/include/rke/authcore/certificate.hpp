#pragma once

// Compact fixed-width certificates, a two-tier CA hierarchy and revocation.
//
// Wire layout (153 bytes, all integers big-endian):
//   serial(8) | subject_id(16) | subject_public_key(33) | issuer_id(16)
//   | not_before(8) | not_after(8) | signature(64)
// The signature covers the first 89 bytes.

#include <rke/authcore/ecdsa.hpp>
#include <rke/authcore/primitives.hpp>
#include <rke/common.hpp>

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace rke::auth {

using UnixSeconds = std::int64_t;

/// Fixed reference clock for simulated deployments.
inline constexpr UnixSeconds kEpoch = 1'700'000'000;

struct Validity {
    UnixSeconds not_before = kEpoch - 86'400;
    UnixSeconds not_after = kEpoch + 10LL * 365 * 86'400;

    bool contains(UnixSeconds t) const { return not_before <= t && t <= not_after; }

    bool operator==(const Validity&) const = default;
};

/// Stable 16-byte identifier for a named authority.
inline Block name_id(std::string_view name) {
    const Digest d = sha256(name);
    Block out{};
    std::copy_n(d.begin(), out.size(), out.begin());
    return out;
}

struct Certificate {
    static constexpr std::size_t kTbsSize = 8 + 16 + 33 + 16 + 8 + 8;
    static constexpr std::size_t kEncodedSize = kTbsSize + 64;

    std::uint64_t serial = 0;
    Block subject_id{};
    CompressedPoint subject_public_key{};
    Block issuer_id{};
    Validity validity{};
    Signature signature{};

    Bytes encode_tbs() const {
        Bytes out;
        out.reserve(kEncodedSize);
        put_u64(out, serial);
        out.insert(out.end(), subject_id.begin(), subject_id.end());
        out.insert(out.end(), subject_public_key.begin(), subject_public_key.end());
        out.insert(out.end(), issuer_id.begin(), issuer_id.end());
        put_u64(out, static_cast<std::uint64_t>(validity.not_before));
        put_u64(out, static_cast<std::uint64_t>(validity.not_after));
        return out;
    }

    std::array<Byte, kEncodedSize> encode() const {
        Bytes tbs = encode_tbs();
        tbs.insert(tbs.end(), signature.begin(), signature.end());
        return to_array<kEncodedSize>(tbs);
    }

    static Certificate decode(ByteView bytes) {
        if (bytes.size() != kEncodedSize) throw DecodeError("certificate must be exactly 153 bytes");
        Certificate c;
        std::size_t at = 0;
        auto take = [&](std::size_t n) {
            ByteView v = bytes.subspan(at, n);
            at += n;
            return v;
        };
        c.serial = get_u64(take(8));
        c.subject_id = to_array<16>(take(16));
        c.subject_public_key = to_array<33>(take(33));
        c.issuer_id = to_array<16>(take(16));
        c.validity.not_before = static_cast<UnixSeconds>(get_u64(take(8)));
        c.validity.not_after = static_cast<UnixSeconds>(get_u64(take(8)));
        c.signature = to_array<64>(take(64));
        if (!(c.validity.not_before < c.validity.not_after)) throw DecodeError("certificate validity window is empty");
        return c;
    }

    bool self_signed() const { return issuer_id == subject_id; }

    bool operator==(const Certificate& other) const = default;

private:
    static void put_u64(Bytes& out, std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<Byte>((v >> shift) & 0xff));
    }
    static std::uint64_t get_u64(ByteView v) {
        std::uint64_t out = 0;
        for (Byte b : v) out = (out << 8) | b;
        return out;
    }
};

/// Revoked certificates, keyed by (issuer, serial). Append-only.
class RevocationList {
public:
    void revoke(const Block& issuer_id, std::uint64_t serial) { revoked_.emplace(issuer_id, serial); }
    void revoke(const Certificate& cert) { revoke(cert.issuer_id, cert.serial); }

    bool is_revoked(const Certificate& cert) const { return revoked_.contains({cert.issuer_id, cert.serial}); }
    std::size_t size() const { return revoked_.size(); }
    bool empty() const { return revoked_.empty(); }

private:
    std::set<std::pair<Block, std::uint64_t>> revoked_;
};

/// True iff every link of cert -> chain[0] -> ... -> chain.back() is signed by the next
/// element, chain.back() is self-signed, every validity window contains `now`, and no
/// certificate on the path is revoked. An undecodable public key throws DecodeError.
inline bool verify_chain(const Certificate& cert, std::span<const Certificate> chain, const RevocationList& crl,
                         UnixSeconds now) {
    if (chain.empty()) return false;
    std::vector<const Certificate*> path{&cert};
    for (const Certificate& c : chain) path.push_back(&c);

    for (std::size_t i = 0; i < path.size(); ++i) {
        const Certificate& subject = *path[i];
        const Certificate& issuer = i + 1 < path.size() ? *path[i + 1] : subject;
        if (i + 1 == path.size() && !subject.self_signed()) return false;
        if (subject.issuer_id != issuer.subject_id) return false;
        if (!verify(issuer.subject_public_key, subject.encode_tbs(), subject.signature)) return false;
        if (!subject.validity.contains(now)) return false;
        if (crl.is_revoked(subject)) return false;
    }
    return true;
}

template <std::uniform_random_bit_generator Rng>
Block random_block(Rng& rng) {
    // Low byte of each draw: engine output is fully specified, distributions are not.
    static_assert(Rng::min() == 0 && Rng::max() >= 0xff, "generator must yield at least 8 random bits per call");
    Block out{};
    for (auto& b : out) b = static_cast<Byte>(rng() & 0xff);
    return out;
}

/// An issuing authority: its key, its own certificate, and its serial counter.
struct CertificateAuthority {
    SigningKeypair keypair;
    Certificate cert;
    std::uint64_t next_serial = 1;

    Certificate issue(const Block& subject_id, const CompressedPoint& subject_key, const Validity& validity) {
        Certificate c;
        c.serial = next_serial++;
        c.subject_id = subject_id;
        c.subject_public_key = subject_key;
        c.issuer_id = cert.subject_id;
        c.validity = validity;
        c.signature = sign(keypair.secret, c.encode_tbs());
        return c;
    }
};

template <std::uniform_random_bit_generator Rng>
CertificateAuthority gen_root_ca(Rng& rng, std::string_view name = "vehicle-server-root", Validity validity = {}) {
    CertificateAuthority ca;
    ca.keypair = generate_keypair(rng);
    ca.cert.subject_id = name_id(name);
    // A self-signed certificate names itself as issuer, so issue() works once subject_id is set.
    ca.cert = ca.issue(ca.cert.subject_id, ca.keypair.public_key, validity);
    return ca;
}

template <std::uniform_random_bit_generator Rng>
CertificateAuthority gen_intermediate_ca(CertificateAuthority& root, Rng& rng,
                                         std::string_view name = "vehicle-system", Validity validity = {}) {
    CertificateAuthority ca;
    ca.keypair = generate_keypair(rng);
    ca.cert = root.issue(name_id(name), ca.keypair.public_key, validity);
    return ca;
}

}  // namespace rke::auth
