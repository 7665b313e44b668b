#pragma once

// Scripted adversaries run against live protocol state machines.
//
// Each attack has one check it is meant to hit. The verdict is "rejected" only when no
// command ran and the transcript shows that check firing; any other ending counts as
// "succeeded", including an attacker that got further than the check allows but was
// stopped later for an unrelated reason.

#include <rke/protocol/session.hpp>
#include <rke/scenario/config.hpp>

#include <optional>
#include <random>
#include <string_view>

namespace rke::scenario {

enum class FailurePoint { None, IgnoredAtAdv, CrtError, ErrorRand1, ControlRejected };

constexpr std::string_view to_string(FailurePoint p) {
    switch (p) {
        case FailurePoint::None: return "none";
        case FailurePoint::IgnoredAtAdv: return "ignored at adv";
        case FailurePoint::CrtError: return "crt error";
        case FailurePoint::ErrorRand1: return "error rand1";
        case FailurePoint::ControlRejected: return "control rejected";
    }
    return "?";
}

enum class Verdict { Rejected, Succeeded };

constexpr std::string_view to_string(Verdict v) { return v == Verdict::Rejected ? "rejected" : "succeeded"; }

constexpr FailurePoint expected_failure_point(AttackKind k) {
    switch (k) {
        case AttackKind::ImpersonateInject: return FailurePoint::IgnoredAtAdv;
        case AttackKind::ImpersonateRevoked: return FailurePoint::CrtError;
        case AttackKind::ImpersonateStaleKey: return FailurePoint::ErrorRand1;
        case AttackKind::ReplayControl: return FailurePoint::ControlRejected;
    }
    return FailurePoint::None;
}

/// Whether the defense that stops `k` is switched on. Replay is stopped by either the
/// rotated key or the fresh rand2, so both must be off for it to get through.
constexpr bool defense_enabled(AttackKind k, const proto::Defenses& d) {
    switch (k) {
        case AttackKind::ImpersonateInject: return d.whitelist;
        case AttackKind::ImpersonateRevoked: return d.revocation;
        case AttackKind::ImpersonateStaleKey: return d.key_rotation;
        case AttackKind::ReplayControl: return d.key_rotation || d.fresh_nonces;
    }
    return true;
}

/// Defenses with exactly the ones guarding `k` switched off.
inline proto::Defenses without_defense(AttackKind k, proto::Defenses d = {}) {
    switch (k) {
        case AttackKind::ImpersonateInject: d.whitelist = false; break;
        case AttackKind::ImpersonateRevoked: d.revocation = false; break;
        case AttackKind::ImpersonateStaleKey: d.key_rotation = false; break;
        case AttackKind::ReplayControl:
            d.key_rotation = false;
            d.fresh_nonces = false;
            break;
    }
    return d;
}

struct AttackReport {
    AttackKind kind = AttackKind::ImpersonateInject;
    std::int64_t trigger_event = 0;
    bool defense_on = true;
    bool connected = false;
    bool executed = false;
    FailurePoint observed = FailurePoint::None;
    Verdict verdict = Verdict::Succeeded;
    proto::Trace transcript;

    FailurePoint expected_point() const { return expected_failure_point(kind); }
    Verdict expected_verdict() const { return defense_on ? Verdict::Rejected : Verdict::Succeeded; }
    bool as_expected() const { return verdict == expected_verdict(); }
};

inline FailurePoint failure_point_of(const proto::RoundResult& r) {
    if (!r.connected) return FailurePoint::IgnoredAtAdv;
    if (r.verify_failure)
        return *r.verify_failure == proto::FailureReason::CrtError ? FailurePoint::CrtError : FailurePoint::ErrorRand1;
    if (r.control_rejected) return FailurePoint::ControlRejected;
    return FailurePoint::None;
}

/// Fresh credentials for the owner's fob, installed out of band (dealer visit).
template <std::uniform_random_bit_generator Rng>
void reissue_owner_fob(proto::Deployment& d, Rng& rng) {
    auth::FobIssuance issued = auth::issue_fob_credentials(d.system.intermediate, d.system.vin, rng);
    d.system.active_fob_cert = issued.creds.cert;
    d.fob.creds = issued.creds;
    d.fob.phase = proto::FobPhase::Idle;
    d.vehicle.whitelist = {issued.creds.pid};
    d.vehicle.session_key = issued.creds.session_key;
    d.vehicle.prev_session_key.reset();
}

namespace detail {

inline proto::Interceptor replace_first(proto::Party who, proto::MessageKind kind, proto::Message with) {
    auto done = std::make_shared<bool>(false);
    return [=](proto::Party from, const proto::Message& m) -> std::optional<proto::Message> {
        if (!*done && from == who && proto::kind_of(m) == kind) {
            *done = true;
            return with;
        }
        return m;
    };
}

}  // namespace detail

/// Runs one attack against `d`. The deployment is left usable for the owner's fob.
template <std::uniform_random_bit_generator Rng>
AttackReport run_attack(AttackKind kind, proto::Deployment& d, Rng& rng, std::int64_t trigger_event = 0) {
    using namespace proto;
    AttackReport rep;
    rep.kind = kind;
    rep.trigger_event = trigger_event;
    rep.defense_on = defense_enabled(kind, Defenses{d.vehicle.whitelist_enabled, d.system.check_revocation,
                                                    d.vehicle.rotate_keys, d.vehicle.fresh_nonces});
    RoundResult result;

    switch (kind) {
        case AttackKind::ImpersonateInject: {
            // The attacker broadcasts under its own identity and keys, presenting the
            // owner's certificate, which is public.
            FobState attacker;
            attacker.creds.pid = auth::random_block(rng);
            attacker.creds.session_key = auth::random_block(rng);
            attacker.creds.cert = d.fob.creds.cert;
            result = run_round(attacker, d.vehicle, d.system, rng, d.now, ++d.round, {}, &rep.transcript);
            // The attack goal here is a connection.
            rep.connected = result.connected;
            rep.executed = result.executed;
            rep.observed = failure_point_of(result);
            break;
        }
        case AttackKind::ImpersonateRevoked: {
            // The fob was stolen; the owner reported it and its certificate was revoked.
            FobState stolen = d.fob;
            system_revoke(d.system, d.fob.creds.cert);
            result = run_round(stolen, d.vehicle, d.system, rng, d.now, ++d.round, {}, &rep.transcript);
            rep.connected = result.connected;
            rep.executed = result.executed;
            rep.observed = failure_point_of(result);
            reissue_owner_fob(d, rng);
            break;
        }
        case AttackKind::ImpersonateStaleKey: {
            // Stolen before the owner's next round, then the system pushes new credentials.
            FobState stolen = d.fob;
            const RoundResult owner = run_round(d, rng);
            if (!owner.executed) throw InvalidState("stale-key attack: owner round failed");
            auto [creds, update] = system_issue_update(d.system, d.vehicle, rng);
            if (!fob_on_cred_update(d.fob, update)) throw InvalidState("stale-key attack: owner rejected update");

            // The attacker installs the new public certificate and replays the owner's
            // next broadcast, captured over the air.
            stolen.creds.cert = creds.cert;
            FobState owner_copy = d.fob;
            fob_reset(owner_copy);
            const Adv captured = fob_make_adv(owner_copy);

            result = run_round(stolen, d.vehicle, d.system, rng, d.now, ++d.round,
                               detail::replace_first(Party::Fob, MessageKind::Adv, captured), &rep.transcript);
            rep.connected = result.connected;
            rep.executed = result.executed;
            rep.observed = failure_point_of(result);
            if (result.executed) reissue_owner_fob(d, rng);
            break;
        }
        case AttackKind::ReplayControl: {
            // Round N: record the owner's UNLOCK. Round N+1: the owner asks for LOCK and the
            // attacker swaps in the recorded control packet.
            d.fob.control_cmd = encode_command(Command::Unlock);
            const RoundResult recorded = run_round(d, rng);
            if (!recorded.executed) throw InvalidState("replay attack: recording round failed");
            std::optional<Message> control_n;
            for (const auto& [from, m] : recorded.delivered)
                if (kind_of(m) == MessageKind::ControlData) control_n = m;

            d.fob.control_cmd = encode_command(Command::Lock);
            result = run_round(d.fob, d.vehicle, d.system, rng, d.now, ++d.round,
                               detail::replace_first(Party::Fob, MessageKind::ControlData, *control_n),
                               &rep.transcript);
            d.fob.control_cmd = encode_command(Command::Unlock);
            rep.connected = result.connected;
            rep.executed = result.executed && result.command == Command::Unlock;
            rep.observed = failure_point_of(result);
            break;
        }
    }

    rep.verdict = !rep.executed && rep.observed == rep.expected_point() ? Verdict::Rejected : Verdict::Succeeded;
    return rep;
}

}  // namespace rke::scenario
