#include <rke/protocol/session.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace rke;
using namespace rke::proto;

namespace {

constexpr const char* kVin = "WVWZZZ1JZXW000001";

bool keys_agree(const Deployment& d) { return d.fob.creds.session_key == d.vehicle.session_key; }

std::optional<Message> first_of(const RoundResult& r, MessageKind k) {
    for (const auto& [from, m] : r.delivered)
        if (kind_of(m) == k) return m;
    return std::nullopt;
}

Interceptor replace_first(MessageKind kind, Message with) {
    auto done = std::make_shared<bool>(false);
    return [=](Party, const Message& m) -> std::optional<Message> {
        if (!*done && kind_of(m) == kind) {
            *done = true;
            return with;
        }
        return m;
    };
}

class Proto : public ::testing::Test {
protected:
    std::mt19937_64 rng{1234};
    Deployment d = provision(kVin, rng);

    // Drives the vehicle and fob by hand up to the point where the vehicle holds a challenge.
    AuthRequest connect_and_challenge() {
        fob_reset(d.fob);
        vehicle_begin_scan(d.vehicle);
        const Adv adv = fob_make_adv(d.fob);
        EXPECT_EQ(vehicle_on_adv(d.vehicle, adv), AdvDecision::Connect);
        fob_on_connected(d.fob);
        return vehicle_make_challenge(d.vehicle, rng);
    }
};

}  // namespace

TEST_F(Proto, AdvMatchesCipherOracle) {
    const Adv a = fob_make_adv(d.fob);
    EXPECT_EQ(Bytes(a.adv.begin(), a.adv.end()), auth::sym_encrypt(d.fob.creds.session_key, d.fob.creds.pid));
    fob_reset(d.fob);
    EXPECT_EQ(fob_make_adv(d.fob), a);
    EXPECT_THROW(fob_make_adv(d.fob), InvalidState);
}

TEST(ProtoAdv, ZeroPidIsRawBlock) {
    FobState f;
    f.creds.session_key = to_array<16>(from_hex("2b7e151628aed2a6abf7158809cf4f3c"));
    f.creds.pid = Block{};
    EXPECT_EQ(fob_make_adv(f).adv, auth::aes128_encrypt_block(f.creds.session_key, Block{}));
}

TEST_F(Proto, VehicleAdvDecisions) {
    vehicle_begin_scan(d.vehicle);
    Adv other{to_array<16>(auth::sym_encrypt(d.vehicle.session_key, auth::random_block(rng)))};
    EXPECT_EQ(vehicle_on_adv(d.vehicle, other), AdvDecision::Ignore);
    EXPECT_EQ(vehicle_on_adv(d.vehicle, Adv{auth::random_block(rng)}), AdvDecision::Ignore);
    EXPECT_FALSE(d.vehicle.connected);
    EXPECT_EQ(vehicle_on_adv(d.vehicle, fob_make_adv(d.fob)), AdvDecision::Connect);
    EXPECT_TRUE(d.vehicle.connected);
}

TEST_F(Proto, ChallengeDecryptsToRand1) {
    const AuthRequest req = connect_and_challenge();
    EXPECT_TRUE(req.cert_request);
    EXPECT_EQ(auth::sym_decrypt(d.vehicle.session_key, req.auth_data1, 16),
              Bytes(d.vehicle.rand1->begin(), d.vehicle.rand1->end()));
    const Block first = *d.vehicle.rand1;
    const AuthRequest again = connect_and_challenge();
    EXPECT_NE(*d.vehicle.rand1, first);
    EXPECT_NE(again.auth_data1, req.auth_data1);
}

TEST(ProtoChallenge, DeterministicForSeed) {
    auto challenge = [] {
        std::mt19937_64 rng(99);
        Deployment d = provision(kVin, rng);
        vehicle_begin_scan(d.vehicle);
        vehicle_on_adv(d.vehicle, fob_make_adv(d.fob));
        return vehicle_make_challenge(d.vehicle, rng);
    };
    EXPECT_EQ(challenge(), challenge());
}

TEST_F(Proto, FobAnswersChallenge) {
    const AuthRequest req = connect_and_challenge();
    const AuthResponse resp = fob_on_challenge(d.fob, req);
    EXPECT_EQ(resp.rand1, *d.vehicle.rand1);
    EXPECT_EQ(resp.cert, d.fob.creds.cert.encode());
    EXPECT_EQ(d.fob.phase, FobPhase::AwaitVerdict);
}

TEST_F(Proto, StaleKeyGetsWrongRand1) {
    const AuthRequest req = connect_and_challenge();
    FobState stale = d.fob;
    stale.creds.session_key = auth::random_block(rng);
    EXPECT_NE(fob_on_challenge(stale, req).rand1, *d.vehicle.rand1);
}

TEST_F(Proto, VerdictHappyPath) {
    const AuthRequest req = connect_and_challenge();
    const Message verdict = vehicle_on_auth_response(d.vehicle, d.system, fob_on_challenge(d.fob, req), d.now, rng);
    ASSERT_EQ(kind_of(verdict), MessageKind::VerifyOk);
    EXPECT_EQ(d.vehicle.phase, VehiclePhase::Authed);
    EXPECT_EQ(auth::sym_decrypt(d.vehicle.session_key, std::get<VerifyOk>(verdict).auth_data2, 16),
              Bytes(d.vehicle.rand2->begin(), d.vehicle.rand2->end()));

    const auto control = fob_on_verdict(d.fob, verdict);
    ASSERT_TRUE(control.has_value());
    EXPECT_EQ(control->data.size(), 32u);
    const Bytes plain = auth::sym_decrypt(d.fob.creds.session_key, control->data, 32);
    EXPECT_EQ(to_array<16>(ByteView{plain}.first(16)), *d.vehicle.rand2);
    EXPECT_EQ(decode_command(to_array<16>(ByteView{plain}.subspan(16))), Command::Unlock);
}

TEST_F(Proto, RevokedCertificate) {
    system_revoke(d.system, d.fob.creds.cert);
    const AuthRequest req = connect_and_challenge();
    const Message verdict = vehicle_on_auth_response(d.vehicle, d.system, fob_on_challenge(d.fob, req), d.now, rng);
    EXPECT_EQ(verdict, Message{VerifyFailed{FailureReason::CrtError}});
    EXPECT_EQ(d.vehicle.phase, VehiclePhase::Rejected);
    EXPECT_FALSE(fob_on_verdict(d.fob, verdict).has_value());
    EXPECT_EQ(d.fob.phase, FobPhase::Sleep);
    EXPECT_EQ(d.fob.last_failure, FailureReason::CrtError);
}

TEST_F(Proto, WrongRand1) {
    const AuthRequest req = connect_and_challenge();
    AuthResponse resp = fob_on_challenge(d.fob, req);
    resp.rand1[0] ^= 1;
    EXPECT_EQ(vehicle_on_auth_response(d.vehicle, d.system, resp, d.now, rng),
              Message{VerifyFailed{FailureReason::ErrorRand1}});
}

TEST_F(Proto, UndecodableOrForeignCertificate) {
    {
        const AuthRequest req = connect_and_challenge();
        AuthResponse resp = fob_on_challenge(d.fob, req);
        resp.cert.fill(0);  // empty validity window
        EXPECT_EQ(vehicle_on_auth_response(d.vehicle, d.system, resp, d.now, rng),
                  Message{VerifyFailed{FailureReason::CrtError}});
    }
    {
        // A valid certificate for a different fob does not match the PID behind the broadcast.
        auth::FobIssuance other = auth::issue_fob_credentials(d.system.intermediate, kVin, rng);
        const AuthRequest req = connect_and_challenge();
        AuthResponse resp = fob_on_challenge(d.fob, req);
        resp.cert = other.creds.cert.encode();
        EXPECT_EQ(vehicle_on_auth_response(d.vehicle, d.system, resp, d.now, rng),
                  Message{VerifyFailed{FailureReason::CrtError}});
    }
}

TEST_F(Proto, FullRoundRotatesBothKeys) {
    const auth::SymmetricKey before = d.vehicle.session_key;
    const RoundResult r = run_round(d, rng);
    EXPECT_TRUE(r.executed);
    EXPECT_EQ(r.command, Command::Unlock);
    EXPECT_EQ(d.vehicle.phase, VehiclePhase::Done);
    EXPECT_EQ(d.fob.phase, FobPhase::Done);
    EXPECT_TRUE(keys_agree(d));
    EXPECT_NE(d.vehicle.session_key, before);
    EXPECT_EQ(d.vehicle.prev_session_key, before);
    EXPECT_EQ(r.delivered.size(), 6u);
}

TEST_F(Proto, ControlWithFlippedRand2Bit) {
    const AuthRequest req = connect_and_challenge();
    const Message verdict = vehicle_on_auth_response(d.vehicle, d.system, fob_on_challenge(d.fob, req), d.now, rng);
    fob_on_verdict(d.fob, verdict);
    Block bad = *d.vehicle.rand2;
    bad[15] ^= 0x01;
    Bytes plain(bad.begin(), bad.end());
    const Block cmd = encode_command(Command::Unlock);
    plain.insert(plain.end(), cmd.begin(), cmd.end());
    const ControlOutcome out =
        vehicle_on_control(d.vehicle, ControlData{to_array<32>(auth::sym_encrypt(d.vehicle.session_key, plain))});
    EXPECT_FALSE(out.executed);
    EXPECT_FALSE(out.reply.has_value());
    EXPECT_EQ(d.vehicle.phase, VehiclePhase::Rejected);
}

TEST_F(Proto, ControlAckOnlyFromAwaitingState) {
    EXPECT_THROW(fob_on_control_ok(d.fob), InvalidState);
    const FobState before = d.fob;
    EXPECT_FALSE(fob_handle(d.fob, ControlOk{}).has_value());
    EXPECT_EQ(d.fob.phase, before.phase);
    EXPECT_EQ(d.fob.creds.session_key, before.creds.session_key);
}

TEST_F(Proto, ReplayedControlRejected) {
    const RoundResult n = run_round(d, rng);
    ASSERT_TRUE(n.executed);
    const RoundResult n1 = run_round(d, rng, replace_first(MessageKind::ControlData, *first_of(n, MessageKind::ControlData)));
    EXPECT_FALSE(n1.executed);
    EXPECT_TRUE(n1.control_rejected);
    EXPECT_TRUE(keys_agree(d));
    EXPECT_TRUE(run_round(d, rng).executed);
}

// Every message of round N, substituted for its counterpart in round N+1.
TEST_F(Proto, ReplayOfAnyPreviousMessage) {
    for (MessageKind k : {MessageKind::Adv, MessageKind::AuthRequest, MessageKind::AuthResponse, MessageKind::VerifyOk,
                          MessageKind::ControlData}) {
        const RoundResult n = run_round(d, rng);
        ASSERT_TRUE(n.executed);
        const auto old = first_of(n, k);
        ASSERT_TRUE(old.has_value());
        const RoundResult n1 = run_round(d, rng, replace_first(k, *old));
        EXPECT_FALSE(n1.executed) << to_string(k);
        EXPECT_TRUE(keys_agree(d)) << to_string(k);
    }
    EXPECT_TRUE(run_round(d, rng).executed);
}

TEST_F(Proto, LostControlOkRecoversNextRound) {
    const Interceptor drop_ack = [](Party, const Message& m) -> std::optional<Message> {
        if (kind_of(m) == MessageKind::ControlOk) return std::nullopt;
        return m;
    };
    const RoundResult lost = run_round(d, rng, drop_ack);
    EXPECT_TRUE(lost.executed);
    EXPECT_FALSE(keys_agree(d));
    EXPECT_EQ(d.vehicle.prev_session_key, d.fob.creds.session_key);

    const RoundResult next = run_round(d, rng);
    EXPECT_TRUE(next.executed);
    EXPECT_TRUE(keys_agree(d));
}

TEST_F(Proto, CredentialUpdate) {
    ASSERT_TRUE(run_round(d, rng).executed);
    const auth::Certificate old_cert = d.fob.creds.cert;
    FobState attacker = d.fob;

    auto [creds, update] = system_issue_update(d.system, d.vehicle, rng);
    EXPECT_TRUE(creds.consistent());
    ASSERT_TRUE(fob_on_cred_update(d.fob, update));
    EXPECT_EQ(d.fob.creds, creds);
    EXPECT_FALSE(system_verify_fob_cert(d.system, old_cert, d.now));
    EXPECT_TRUE(system_verify_fob_cert(d.system, creds.cert, d.now));

    // A fob still on the transport key from before cannot read an update sealed with another key.
    FobState outsider;
    outsider.creds.session_key = auth::random_block(rng);
    EXPECT_FALSE(fob_on_cred_update(outsider, update));

    const RoundResult r = run_round(d, rng);
    EXPECT_TRUE(r.executed);
    EXPECT_TRUE(keys_agree(d));

    // The holder of the old key cannot recover the challenge nonce.
    vehicle_begin_scan(d.vehicle);
    fob_reset(d.fob);
    ASSERT_EQ(vehicle_on_adv(d.vehicle, fob_make_adv(d.fob)), AdvDecision::Connect);
    const AuthRequest req = vehicle_make_challenge(d.vehicle, rng);
    fob_reset(attacker);
    fob_make_adv(attacker);
    EXPECT_NE(fob_on_challenge(attacker, req).rand1, *d.vehicle.rand1);
}

TEST_F(Proto, UpdateRequiresSession) {
    EXPECT_THROW(system_issue_update(d.system, d.vehicle, rng), InvalidState);
}

TEST_F(Proto, StaleCredUpdateReplayIgnored) {
    ASSERT_TRUE(run_round(d, rng).executed);
    auto first = system_issue_update(d.system, d.vehicle, rng);
    ASSERT_TRUE(fob_on_cred_update(d.fob, first.second));
    ASSERT_TRUE(run_round(d, rng).executed);
    const auth::CredentialSet held = d.fob.creds;
    EXPECT_FALSE(fob_on_cred_update(d.fob, first.second));
    EXPECT_EQ(d.fob.creds, held);
}

TEST(Wire, RoundTripEveryKind) {
    std::mt19937_64 rng(5);
    std::vector<Message> samples{Adv{auth::random_block(rng)},
                                 AuthRequest{auth::random_block(rng), true},
                                 AuthRequest{auth::random_block(rng), false},
                                 AuthResponse{},
                                 VerifyOk{auth::random_block(rng)},
                                 VerifyFailed{FailureReason::ErrorRand1},
                                 VerifyFailed{FailureReason::CrtError},
                                 ControlData{},
                                 ControlOk{},
                                 CredUpdate{}};
    for (const Message& m : samples) {
        const Bytes wire = encode(m);
        EXPECT_EQ(wire.size(), 1 + payload_size(kind_of(m)));
        EXPECT_EQ(wire[0], static_cast<Byte>(kind_of(m)));
        EXPECT_EQ(decode(wire), m);
    }
    EXPECT_EQ(payload_size(MessageKind::AuthResponse), 169u);
    const Bytes failed = encode(VerifyFailed{FailureReason::CrtError});
    EXPECT_EQ(std::string(failed.begin() + 1, failed.begin() + 10), "crt error");
}

TEST(Wire, DecodeErrors) {
    EXPECT_THROW(decode(Bytes{}), DecodeError);
    EXPECT_THROW(decode(Bytes{0}), DecodeError);
    EXPECT_THROW(decode(Bytes{9}), DecodeError);
    EXPECT_THROW(decode(Bytes(16, 1)), DecodeError);  // ADV one byte short
    Bytes req = encode(AuthRequest{});
    req.back() = 2;
    EXPECT_THROW(decode(req), DecodeError);
    Bytes vf = encode(VerifyFailed{});
    vf[1] = 'X';
    EXPECT_THROW(decode(vf), DecodeError);
}

TEST(Wire, Commands) {
    for (Command c : {Command::Lock, Command::Unlock, Command::Trunk}) EXPECT_EQ(decode_command(encode_command(c)), c);
    Block b = encode_command(Command::Lock);
    b[7] = 1;
    EXPECT_FALSE(decode_command(b).has_value());
    EXPECT_FALSE(decode_command(Block{}).has_value());
}

// Arbitrary well-formed messages in every reachable phase: the dispatchers never throw,
// and nothing executes without a matching rand2.
TEST(Totality, RandomMessagesInEveryPhase) {
    std::mt19937_64 rng(31337);
    Deployment d = provision(kVin, rng);
    int executed = 0;
    for (int i = 0; i < 3000; ++i) {
        if (i % 40 == 0) {
            fob_reset(d.fob);
            vehicle_begin_scan(d.vehicle);
        }
        // Walk a random prefix of an honest round so both machines sit in varied phases.
        if (i % 40 == 1) {
            const int steps = static_cast<int>(rng() % 4);
            const Adv adv = fob_make_adv(d.fob);
            VehicleReaction r = vehicle_handle(d.vehicle, d.system, adv, d.now, rng);
            for (int s = 0; s < steps && r.reply; ++s) {
                auto back = fob_handle(d.fob, *r.reply);
                if (!back) break;
                r = vehicle_handle(d.vehicle, d.system, *back, d.now, rng);
            }
        }
        const auto kind = static_cast<MessageKind>(1 + rng() % 8);
        Bytes wire(1 + payload_size(kind));
        wire[0] = static_cast<Byte>(kind);
        for (std::size_t j = 1; j < wire.size(); ++j) wire[j] = static_cast<Byte>(rng());
        if (kind == MessageKind::AuthRequest) wire.back() &= 1;
        if (kind == MessageKind::VerifyFailed) wire = encode(VerifyFailed{rng() & 1 ? FailureReason::CrtError : FailureReason::ErrorRand1});
        const Message m = decode(wire);

        const VehiclePhase vp = d.vehicle.phase;
        ASSERT_NO_THROW({
            const VehicleReaction r = vehicle_handle(d.vehicle, d.system, m, d.now, rng);
            executed += r.executed;
        });
        if (kind == MessageKind::ControlOk || kind == MessageKind::CredUpdate || kind == MessageKind::VerifyOk ||
            kind == MessageKind::VerifyFailed || kind == MessageKind::AuthRequest)
            EXPECT_EQ(d.vehicle.phase, vp);
        ASSERT_NO_THROW(fob_handle(d.fob, m));
    }
    EXPECT_EQ(executed, 0);
}
