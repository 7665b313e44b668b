#pragma once

// Vehicle RF terminal side of the authentication protocol.

#include <rke/authcore/credentials.hpp>
#include <rke/authcore/primitives.hpp>
#include <rke/protocol/message.hpp>
#include <rke/protocol/system.hpp>

#include <algorithm>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace rke::proto {

enum class VehiclePhase { Scanning, ChallengeSent, AwaitCertVerdict, Authed, Done, Rejected };

constexpr std::string_view to_string(VehiclePhase p) {
    switch (p) {
        case VehiclePhase::Scanning: return "SCANNING";
        case VehiclePhase::ChallengeSent: return "CHALLENGE_SENT";
        case VehiclePhase::AwaitCertVerdict: return "AWAIT_CERT_VERDICT";
        case VehiclePhase::Authed: return "AUTHED";
        case VehiclePhase::Done: return "DONE";
        case VehiclePhase::Rejected: return "REJECTED";
    }
    return "?";
}

struct VehicleState {
    VehiclePhase phase = VehiclePhase::Scanning;
    std::vector<auth::PseudoId> whitelist;
    auth::SymmetricKey session_key{};
    std::optional<auth::SymmetricKey> prev_session_key;
    std::optional<Block> rand1;
    std::optional<Block> rand2;

    // Per-connection state.
    bool connected = false;
    std::optional<auth::PseudoId> matched_pid;
    auth::SymmetricKey active_key{};

    // Defenses. Switching one off exists only to demonstrate what it protects against.
    bool whitelist_enabled = true;
    bool rotate_keys = true;
    bool fresh_nonces = true;

    std::optional<Block> reused_rand1;
    std::optional<Block> reused_rand2;
    std::optional<Command> last_executed;
};

enum class AdvDecision { Connect, Ignore };

/// Starts a new authentication round.
inline void vehicle_begin_scan(VehicleState& v) {
    v.phase = VehiclePhase::Scanning;
    v.connected = false;
    v.matched_pid.reset();
    v.rand1.reset();
    v.rand2.reset();
}

/// Matches the broadcast against Enc(key, pid) for every whitelisted pid, first under the
/// current session key, then under the previous one (a fob that missed CONTROL_OK is still
/// on the old key).
inline AdvDecision vehicle_on_adv(VehicleState& v, const Adv& msg) {
    if (v.phase != VehiclePhase::Scanning || v.connected) return AdvDecision::Ignore;

    auto try_key = [&](const auth::SymmetricKey& key) -> bool {
        for (const auth::PseudoId& pid : v.whitelist) {
            if (to_array<16>(auth::sym_encrypt(key, pid)) == msg.adv) {
                v.matched_pid = pid;
                v.active_key = key;
                return true;
            }
        }
        return false;
    };

    bool matched = try_key(v.session_key);
    if (!matched && v.prev_session_key) matched = try_key(*v.prev_session_key);
    if (!matched && !v.whitelist_enabled) {
        v.active_key = v.session_key;
        matched = true;
    }
    if (!matched) return AdvDecision::Ignore;
    v.connected = true;
    return AdvDecision::Connect;
}

template <std::uniform_random_bit_generator Rng>
AuthRequest vehicle_make_challenge(VehicleState& v, Rng& rng) {
    if (!v.connected || v.phase != VehiclePhase::Scanning) throw InvalidState("vehicle_make_challenge: not connected");
    Block r = auth::random_block(rng);
    if (!v.fresh_nonces) {
        if (!v.reused_rand1) v.reused_rand1 = r;
        r = *v.reused_rand1;
    }
    v.rand1 = r;
    v.phase = VehiclePhase::ChallengeSent;
    return AuthRequest{to_array<16>(auth::sym_encrypt(v.active_key, r)), true};
}

/// rand1 echo check, then certificate chain + revocation, then PID cross-check against
/// the whitelist entry that matched the broadcast.
template <std::uniform_random_bit_generator Rng>
Message vehicle_on_auth_response(VehicleState& v, const SystemState& sys, const AuthResponse& msg,
                                 auth::UnixSeconds now, Rng& rng) {
    if (v.phase != VehiclePhase::ChallengeSent) throw InvalidState("vehicle_on_auth_response: no challenge pending");

    auto fail = [&](FailureReason reason) -> Message {
        v.rand1.reset();
        v.phase = VehiclePhase::Rejected;
        return VerifyFailed{reason};
    };

    if (!v.rand1 || msg.rand1 != *v.rand1) return fail(FailureReason::ErrorRand1);

    v.phase = VehiclePhase::AwaitCertVerdict;
    bool cert_ok = false;
    try {
        const auth::Certificate cert = auth::Certificate::decode(msg.cert);
        cert_ok = system_verify_fob_cert(sys, cert, now) && v.matched_pid && cert.subject_id == *v.matched_pid;
    } catch (const DecodeError&) {
        cert_ok = false;
    }
    if (!cert_ok) return fail(FailureReason::CrtError);

    Block r2 = auth::random_block(rng);
    if (!v.fresh_nonces) {
        if (!v.reused_rand2) v.reused_rand2 = r2;
        r2 = *v.reused_rand2;
    }
    v.rand1.reset();
    v.rand2 = r2;
    v.phase = VehiclePhase::Authed;
    return VerifyOk{to_array<16>(auth::sym_encrypt(v.active_key, r2))};
}

struct ControlOutcome {
    bool executed = false;
    std::optional<Command> command;
    std::optional<ControlOk> reply;
};

/// Executes the command only if the decrypted rand2' equals rand2, then rotates the
/// session key to rand2 and keeps the key this session ran on as the previous key.
inline ControlOutcome vehicle_on_control(VehicleState& v, const ControlData& msg) {
    if (v.phase != VehiclePhase::Authed) throw InvalidState("vehicle_on_control: not authenticated");
    const Bytes plain = auth::sym_decrypt(v.active_key, msg.data, 32);
    const Block echoed = to_array<16>(ByteView{plain}.first(16));
    const auto command = decode_command(to_array<16>(ByteView{plain}.subspan(16)));

    if (!v.rand2 || echoed != *v.rand2 || !command) {
        v.rand2.reset();
        v.phase = VehiclePhase::Rejected;
        v.connected = false;
        return {};
    }

    if (v.rotate_keys) {
        v.prev_session_key = v.active_key;
        v.session_key = auth::rotate_session_key(v.active_key, *v.rand2);
    }
    v.rand2.reset();
    v.phase = VehiclePhase::Done;
    v.last_executed = command;
    return ControlOutcome{true, command, ControlOk{}};
}

struct VehicleReaction {
    std::optional<Message> reply;
    bool connected = false;
    bool executed = false;
};

/// Total transition function for the vehicle; unexpected (phase, kind) pairs are ignored.
/// A connect decision on ADV immediately produces the AUTH_REQUEST challenge.
template <std::uniform_random_bit_generator Rng>
VehicleReaction vehicle_handle(VehicleState& v, const SystemState& sys, const Message& msg, auth::UnixSeconds now,
                               Rng& rng) {
    VehicleReaction out;
    switch (kind_of(msg)) {
        case MessageKind::Adv:
            if (v.phase == VehiclePhase::Scanning && !v.connected &&
                vehicle_on_adv(v, std::get<Adv>(msg)) == AdvDecision::Connect) {
                out.connected = true;
                out.reply = vehicle_make_challenge(v, rng);
            }
            break;
        case MessageKind::AuthResponse:
            if (v.phase == VehiclePhase::ChallengeSent)
                out.reply = vehicle_on_auth_response(v, sys, std::get<AuthResponse>(msg), now, rng);
            break;
        case MessageKind::ControlData:
            if (v.phase == VehiclePhase::Authed) {
                ControlOutcome c = vehicle_on_control(v, std::get<ControlData>(msg));
                out.executed = c.executed;
                if (c.reply) out.reply = *c.reply;
            }
            break;
        default:
            break;
    }
    return out;
}

}  // namespace rke::proto
