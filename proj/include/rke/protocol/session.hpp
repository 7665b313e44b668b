#pragma once

// Provisioning, credential updates and a message pump that drives one full
// authentication round between a fob and a vehicle, with an optional
// man-in-the-middle hook for dropping, replacing or replaying traffic.

#include <rke/authcore/certificate.hpp>
#include <rke/authcore/credentials.hpp>
#include <rke/protocol/fob.hpp>
#include <rke/protocol/message.hpp>
#include <rke/protocol/system.hpp>
#include <rke/protocol/vehicle.hpp>

#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace rke::proto {

struct Defenses {
    bool whitelist = true;
    bool revocation = true;
    bool key_rotation = true;
    bool fresh_nonces = true;

    bool operator==(const Defenses&) const = default;
};

struct Deployment {
    auth::CertificateAuthority root;
    SystemState system;
    VehicleState vehicle;
    FobState fob;
    auth::UnixSeconds now = auth::kEpoch;
    int round = 0;
};

inline void apply_defenses(Deployment& d, const Defenses& def) {
    d.vehicle.whitelist_enabled = def.whitelist;
    d.vehicle.rotate_keys = def.key_rotation;
    d.vehicle.fresh_nonces = def.fresh_nonces;
    d.fob.rotate_keys = def.key_rotation;
    d.system.check_revocation = def.revocation;
}

/// Root CA, vehicle-system intermediate CA, one paired fob, and the vehicle terminal
/// holding the fob's PID in its whitelist and the shared rand_init.
template <std::uniform_random_bit_generator Rng>
Deployment provision(std::string vin, Rng& rng, const Defenses& defenses = {}) {
    Deployment d;
    d.root = auth::gen_root_ca(rng);
    d.system.root_cert = d.root.cert;
    d.system.intermediate = auth::gen_intermediate_ca(d.root, rng, "vehicle-system:" + vin);
    d.system.vin = std::move(vin);

    auth::FobIssuance issued = auth::issue_fob_credentials(d.system.intermediate, d.system.vin, rng);
    d.system.active_fob_cert = issued.creds.cert;
    d.fob.creds = issued.creds;
    d.vehicle.whitelist = {issued.creds.pid};
    d.vehicle.session_key = issued.creds.session_key;
    apply_defenses(d, defenses);
    return d;
}

/// Credential refresh pushed over a live session: the outgoing fob certificate is revoked,
/// new credentials are issued, the vehicle switches whitelist and session key, and the
/// new material travels encrypted under the key the fob currently holds.
template <std::uniform_random_bit_generator Rng>
std::pair<auth::CredentialSet, CredUpdate> system_issue_update(SystemState& sys, VehicleState& v, Rng& rng) {
    if (v.phase != VehiclePhase::Authed && v.phase != VehiclePhase::Done)
        throw InvalidState("system_issue_update: no authenticated session");

    const auth::SymmetricKey transport_key = v.phase == VehiclePhase::Authed ? v.active_key : v.session_key;
    if (sys.active_fob_cert) system_revoke(sys, *sys.active_fob_cert);

    auth::FobIssuance issued = auth::issue_fob_credentials(sys.intermediate, sys.vin, rng);
    if (!v.rotate_keys) issued.creds.session_key = transport_key;
    sys.active_fob_cert = issued.creds.cert;

    v.whitelist = {issued.creds.pid};
    v.session_key = issued.creds.session_key;
    v.prev_session_key.reset();

    CredUpdate msg{to_array<256>(auth::sym_encrypt(transport_key, issued.creds.encode()))};
    return {issued.creds, msg};
}

enum class Party { Fob, Vehicle, Attacker };

constexpr std::string_view to_string(Party p) {
    switch (p) {
        case Party::Fob: return "fob";
        case Party::Vehicle: return "vehicle";
        case Party::Attacker: return "attacker";
    }
    return "?";
}

struct TraceEntry {
    int round = 0;
    Party sender = Party::Fob;
    Message message;

    /// round,sender,KIND,payload-hex
    std::string line() const {
        const Bytes wire = encode(message);
        return std::to_string(round) + "," + std::string{to_string(sender)} + "," +
               std::string{to_string(kind_of(message))} + "," + to_hex(ByteView{wire}.subspan(1));
    }
};

using Trace = std::vector<TraceEntry>;

/// Sees every message in flight (with its honest sender) and returns what is actually
/// delivered: the same message, a substitute, or nothing.
using Interceptor = std::function<std::optional<Message>(Party from, const Message&)>;

struct RoundResult {
    bool connected = false;
    bool executed = false;
    std::optional<FailureReason> verify_failure;
    bool control_rejected = false;
    std::optional<Command> command;
    std::vector<std::pair<Party, Message>> delivered;
};

template <std::uniform_random_bit_generator Rng>
RoundResult run_round(FobState& fob, VehicleState& v, const SystemState& sys, Rng& rng, auth::UnixSeconds now,
                      int round, const Interceptor& intercept = {}, Trace* trace = nullptr) {
    RoundResult result;
    fob_reset(fob);
    vehicle_begin_scan(v);

    std::deque<std::pair<Party, Message>> in_flight;
    in_flight.emplace_back(Party::Fob, fob_make_adv(fob));

    // A complete round is 6 messages; the bound only guards against a looping interceptor.
    for (int step = 0; step < 32 && !in_flight.empty(); ++step) {
        auto [from, original] = std::move(in_flight.front());
        in_flight.pop_front();

        std::optional<Message> msg = intercept ? intercept(from, original) : std::optional<Message>{original};
        if (!msg) continue;
        const Party sender = *msg == original ? from : Party::Attacker;
        result.delivered.emplace_back(sender, *msg);
        if (trace) trace->push_back(TraceEntry{round, sender, *msg});

        if (from == Party::Fob) {
            const VehiclePhase before = v.phase;
            VehicleReaction r = vehicle_handle(v, sys, *msg, now, rng);
            if (r.connected) {
                result.connected = true;
                fob_on_connected(fob);
            }
            if (r.executed) {
                result.executed = true;
                result.command = v.last_executed;
            }
            if (before == VehiclePhase::Authed && v.phase == VehiclePhase::Rejected) result.control_rejected = true;
            if (r.reply) {
                if (const auto* f = std::get_if<VerifyFailed>(&*r.reply)) result.verify_failure = f->reason;
                in_flight.emplace_back(Party::Vehicle, *r.reply);
            }
        } else {
            if (auto reply = fob_handle(fob, *msg)) in_flight.emplace_back(Party::Fob, *reply);
        }
    }
    return result;
}

/// Convenience: run the next round of a deployment with its own fob.
template <std::uniform_random_bit_generator Rng>
RoundResult run_round(Deployment& d, Rng& rng, const Interceptor& intercept = {}, Trace* trace = nullptr) {
    return run_round(d.fob, d.vehicle, d.system, rng, d.now, ++d.round, intercept, trace);
}

}  // namespace rke::proto
