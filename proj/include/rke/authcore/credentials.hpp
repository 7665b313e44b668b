#pragma once

// Key-fob credential material: pseudo-identity, signing key, certificate, session key.

#include <rke/authcore/certificate.hpp>
#include <rke/authcore/ecdsa.hpp>
#include <rke/authcore/primitives.hpp>
#include <rke/common.hpp>

#include <random>
#include <string_view>

namespace rke::auth {

using PseudoId = Block;

/// The VIN folded to 16 bytes: first half of its SHA-256.
inline Block vin_digest16(std::string_view vin) {
    const Digest d = sha256(vin);
    Block out{};
    std::copy_n(d.begin(), out.size(), out.begin());
    return out;
}

/// PID = id_fob ^ digest16(VIN) ^ rand_ca.
inline PseudoId derive_pseudo_id(const Block& id_fob, std::string_view vin, const Block& rand_ca) {
    if (vin.empty() || vin.size() > 17) throw InvalidArgument("VIN must be 1..17 characters");
    for (char c : vin)
        if (static_cast<unsigned char>(c) > 0x7f) throw InvalidArgument("VIN must be ASCII");
    return xor_bytes(xor_bytes(id_fob, vin_digest16(vin)), rand_ca);
}

struct CredentialSet {
    static constexpr std::size_t kEncodedSize = 16 + 32 + 33 + Certificate::kEncodedSize + 16;

    PseudoId pid{};
    SigningKeypair keypair{};
    Certificate cert{};
    SymmetricKey session_key{};

    bool consistent() const { return cert.subject_id == pid && cert.subject_public_key == keypair.public_key; }

    Bytes encode() const {
        Bytes out;
        out.reserve(kEncodedSize);
        out.insert(out.end(), pid.begin(), pid.end());
        out.insert(out.end(), keypair.secret.begin(), keypair.secret.end());
        out.insert(out.end(), keypair.public_key.begin(), keypair.public_key.end());
        const auto c = cert.encode();
        out.insert(out.end(), c.begin(), c.end());
        out.insert(out.end(), session_key.begin(), session_key.end());
        return out;
    }

    static CredentialSet decode(ByteView bytes) {
        if (bytes.size() != kEncodedSize) throw DecodeError("credential set has wrong length");
        CredentialSet cs;
        std::size_t at = 0;
        auto take = [&](std::size_t n) {
            ByteView v = bytes.subspan(at, n);
            at += n;
            return v;
        };
        cs.pid = to_array<16>(take(16));
        cs.keypair.secret = to_array<32>(take(32));
        cs.keypair.public_key = to_array<33>(take(33));
        cs.cert = Certificate::decode(take(Certificate::kEncodedSize));
        cs.session_key = to_array<16>(take(16));
        return cs;
    }

    bool operator==(const CredentialSet&) const = default;
};

struct FobIssuance {
    CredentialSet creds;
    Block id_fob{};
    Block rand_ca{};
};

/// Fresh fob identity, pseudo-ID, keypair, certificate (signed by `intermediate`) and rand_init.
template <std::uniform_random_bit_generator Rng>
FobIssuance issue_fob_credentials(CertificateAuthority& intermediate, std::string_view vin, Rng& rng,
                                  Validity validity = {}) {
    FobIssuance out;
    out.id_fob = random_block(rng);
    out.rand_ca = random_block(rng);
    out.creds.session_key = random_block(rng);
    out.creds.pid = derive_pseudo_id(out.id_fob, vin, out.rand_ca);
    out.creds.keypair = generate_keypair(rng);
    out.creds.cert = intermediate.issue(out.creds.pid, out.creds.keypair.public_key, validity);
    return out;
}

}  // namespace rke::auth
