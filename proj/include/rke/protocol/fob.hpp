#pragma once

// Key-fob side of the authentication protocol.

#include <rke/authcore/credentials.hpp>
#include <rke/authcore/primitives.hpp>
#include <rke/protocol/message.hpp>

#include <optional>
#include <string_view>

namespace rke::proto {

enum class FobPhase { Idle, Advertising, AwaitChallenge, AwaitVerdict, AwaitControlAck, Done, Sleep };

constexpr std::string_view to_string(FobPhase p) {
    switch (p) {
        case FobPhase::Idle: return "IDLE";
        case FobPhase::Advertising: return "ADVERTISING";
        case FobPhase::AwaitChallenge: return "AWAIT_CHALLENGE";
        case FobPhase::AwaitVerdict: return "AWAIT_VERDICT";
        case FobPhase::AwaitControlAck: return "AWAIT_CONTROL_ACK";
        case FobPhase::Done: return "DONE";
        case FobPhase::Sleep: return "SLEEP";
    }
    return "?";
}

struct FobState {
    FobPhase phase = FobPhase::Idle;
    auth::CredentialSet creds;
    std::optional<Block> pending_rand2;
    Block control_cmd = encode_command(Command::Unlock);
    bool rotate_keys = true;
    std::optional<FailureReason> last_failure;
};

/// Back to IDLE for the next wake-up.
inline void fob_reset(FobState& fob) {
    fob.phase = FobPhase::Idle;
    fob.pending_rand2.reset();
}

inline Adv fob_make_adv(FobState& fob) {
    if (fob.phase != FobPhase::Idle) throw InvalidState("fob_make_adv: fob is not idle");
    fob.phase = FobPhase::Advertising;
    return Adv{to_array<16>(auth::sym_encrypt(fob.creds.session_key, fob.creds.pid))};
}

inline void fob_on_connected(FobState& fob) {
    if (fob.phase == FobPhase::Advertising) fob.phase = FobPhase::AwaitChallenge;
}

/// Decrypts rand1 and answers with the certificate and rand1' in the clear. With a
/// stale key rand1' is simply wrong; the fob cannot tell.
inline AuthResponse fob_on_challenge(FobState& fob, const AuthRequest& req) {
    if (fob.phase != FobPhase::Advertising && fob.phase != FobPhase::AwaitChallenge)
        throw InvalidState("fob_on_challenge: no challenge expected");
    const Bytes rand1 = auth::sym_decrypt(fob.creds.session_key, req.auth_data1, 16);
    fob.phase = FobPhase::AwaitVerdict;
    return AuthResponse{fob.creds.cert.encode(), to_array<16>(rand1)};
}

/// VERIFY_FAILED puts the fob to sleep; VERIFY_OK yields the encrypted rand2' || control.
inline std::optional<ControlData> fob_on_verdict(FobState& fob, const Message& verdict) {
    if (fob.phase != FobPhase::AwaitVerdict) throw InvalidState("fob_on_verdict: no verdict expected");
    if (const auto* failed = std::get_if<VerifyFailed>(&verdict)) {
        fob.last_failure = failed->reason;
        fob.phase = FobPhase::Sleep;
        return std::nullopt;
    }
    const auto* ok = std::get_if<VerifyOk>(&verdict);
    if (!ok) return std::nullopt;

    const Block rand2 = to_array<16>(auth::sym_decrypt(fob.creds.session_key, ok->auth_data2, 16));
    Bytes plain(rand2.begin(), rand2.end());
    plain.insert(plain.end(), fob.control_cmd.begin(), fob.control_cmd.end());
    fob.pending_rand2 = rand2;
    fob.phase = FobPhase::AwaitControlAck;
    return ControlData{to_array<32>(auth::sym_encrypt(fob.creds.session_key, plain))};
}

inline void fob_on_control_ok(FobState& fob) {
    if (fob.phase != FobPhase::AwaitControlAck) throw InvalidState("fob_on_control_ok: no acknowledgement expected");
    if (fob.rotate_keys && fob.pending_rand2)
        fob.creds.session_key = auth::rotate_session_key(fob.creds.session_key, *fob.pending_rand2);
    fob.pending_rand2.reset();
    fob.phase = FobPhase::Done;
}

/// Installs credentials pushed by the vehicle. Returns false (and changes nothing) when
/// the update does not decrypt under the fob's current session key.
inline bool fob_on_cred_update(FobState& fob, const CredUpdate& update) {
    try {
        const Bytes plain =
            auth::sym_decrypt(fob.creds.session_key, update.data, auth::CredentialSet::kEncodedSize);
        auth::CredentialSet next = auth::CredentialSet::decode(plain);
        if (!next.consistent()) return false;
        fob.creds = next;
        return true;
    } catch (const DecryptError&) {
        return false;
    } catch (const DecodeError&) {
        return false;
    }
}

/// Total transition function: any (phase, message) pair not listed in the protocol
/// is ignored and leaves the state unchanged.
inline std::optional<Message> fob_handle(FobState& fob, const Message& msg) {
    switch (kind_of(msg)) {
        case MessageKind::AuthRequest:
            if (fob.phase == FobPhase::Advertising || fob.phase == FobPhase::AwaitChallenge)
                return fob_on_challenge(fob, std::get<AuthRequest>(msg));
            return std::nullopt;
        case MessageKind::VerifyOk:
        case MessageKind::VerifyFailed:
            if (fob.phase == FobPhase::AwaitVerdict) {
                if (auto control = fob_on_verdict(fob, msg)) return Message{*control};
            }
            return std::nullopt;
        case MessageKind::ControlOk:
            if (fob.phase == FobPhase::AwaitControlAck) fob_on_control_ok(fob);
            return std::nullopt;
        case MessageKind::CredUpdate:
            if (fob.phase == FobPhase::Done || fob.phase == FobPhase::Idle) fob_on_cred_update(fob, std::get<CredUpdate>(msg));
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

}  // namespace rke::proto
