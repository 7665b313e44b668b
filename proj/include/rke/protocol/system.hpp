#pragma once

// Vehicle system: intermediate CA, revocation list and certificate checks.

#include <rke/authcore/certificate.hpp>
#include <rke/authcore/credentials.hpp>

#include <array>
#include <optional>
#include <string>

namespace rke::proto {

struct SystemState {
    auth::CertificateAuthority intermediate;
    auth::Certificate root_cert;
    auth::RevocationList crl;
    std::optional<auth::Certificate> active_fob_cert;
    std::string vin;
    bool check_revocation = true;

    bool chains_to_root() const {
        const std::array<auth::Certificate, 1> chain{root_cert};
        return auth::verify_chain(intermediate.cert, chain, {}, auth::kEpoch);
    }
};

inline bool system_verify_fob_cert(const SystemState& sys, const auth::Certificate& cert, auth::UnixSeconds now) {
    const std::array<auth::Certificate, 2> chain{sys.intermediate.cert, sys.root_cert};
    static const auth::RevocationList no_revocations;
    return auth::verify_chain(cert, chain, sys.check_revocation ? sys.crl : no_revocations, now);
}

inline void system_revoke(SystemState& sys, const auth::Certificate& cert) { sys.crl.revoke(cert); }

}  // namespace rke::proto
