#pragma once

// Over-the-air messages. Wire form is a 1-byte kind tag followed by a fixed-width
// payload whose size depends only on the kind.

#include <rke/authcore/certificate.hpp>
#include <rke/authcore/credentials.hpp>
#include <rke/common.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace rke::proto {

enum class MessageKind : std::uint8_t {
    Adv = 1,
    AuthRequest = 2,
    AuthResponse = 3,
    VerifyOk = 4,
    VerifyFailed = 5,
    ControlData = 6,
    ControlOk = 7,
    CredUpdate = 8,
};

constexpr std::string_view to_string(MessageKind k) {
    switch (k) {
        case MessageKind::Adv: return "ADV";
        case MessageKind::AuthRequest: return "AUTH_REQUEST";
        case MessageKind::AuthResponse: return "AUTH_RESPONSE";
        case MessageKind::VerifyOk: return "VERIFY_OK";
        case MessageKind::VerifyFailed: return "VERIFY_FAILED";
        case MessageKind::ControlData: return "CONTROL_DATA";
        case MessageKind::ControlOk: return "CONTROL_OK";
        case MessageKind::CredUpdate: return "CRED_UPDATE";
    }
    return "?";
}

enum class FailureReason : std::uint8_t { ErrorRand1, CrtError };

constexpr std::string_view to_string(FailureReason r) {
    return r == FailureReason::ErrorRand1 ? "error rand1" : "crt error";
}

using CertBytes = std::array<Byte, auth::Certificate::kEncodedSize>;
using ControlBlock = std::array<Byte, 32>;
using CredUpdateBlock = std::array<Byte, 256>;

struct Adv {
    Block adv{};
    bool operator==(const Adv&) const = default;
};
struct AuthRequest {
    Block auth_data1{};
    bool cert_request = true;
    bool operator==(const AuthRequest&) const = default;
};
struct AuthResponse {
    CertBytes cert{};
    Block rand1{};  // sent in the clear
    bool operator==(const AuthResponse&) const = default;
};
struct VerifyOk {
    Block auth_data2{};
    bool operator==(const VerifyOk&) const = default;
};
struct VerifyFailed {
    FailureReason reason = FailureReason::CrtError;
    bool operator==(const VerifyFailed&) const = default;
};
struct ControlData {
    ControlBlock data{};
    bool operator==(const ControlData&) const = default;
};
struct ControlOk {
    bool operator==(const ControlOk&) const = default;
};
struct CredUpdate {
    CredUpdateBlock data{};
    bool operator==(const CredUpdate&) const = default;
};

// Alternative order matches MessageKind - 1.
using Message = std::variant<Adv, AuthRequest, AuthResponse, VerifyOk, VerifyFailed, ControlData, ControlOk, CredUpdate>;

inline MessageKind kind_of(const Message& m) { return static_cast<MessageKind>(m.index() + 1); }

/// Payload width per kind. VERIFY_FAILED carries the reason string zero-padded to 16 bytes.
constexpr std::size_t payload_size(MessageKind k) {
    switch (k) {
        case MessageKind::Adv: return 16;
        case MessageKind::AuthRequest: return 17;
        case MessageKind::AuthResponse: return auth::Certificate::kEncodedSize + 16;
        case MessageKind::VerifyOk: return 16;
        case MessageKind::VerifyFailed: return 16;
        case MessageKind::ControlData: return 32;
        case MessageKind::ControlOk: return 0;
        case MessageKind::CredUpdate: return 256;
    }
    return 0;
}

namespace detail {

template <typename... Parts>
Bytes concat(Parts const&... parts) {
    Bytes out;
    (out.insert(out.end(), std::begin(parts), std::end(parts)), ...);
    return out;
}

}  // namespace detail

inline Bytes encode(const Message& m) {
    Bytes payload = std::visit(
        [](const auto& p) -> Bytes {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Adv>) {
                return detail::concat(p.adv);
            } else if constexpr (std::is_same_v<T, AuthRequest>) {
                Bytes b = detail::concat(p.auth_data1);
                b.push_back(p.cert_request ? 1 : 0);
                return b;
            } else if constexpr (std::is_same_v<T, AuthResponse>) {
                return detail::concat(p.cert, p.rand1);
            } else if constexpr (std::is_same_v<T, VerifyOk>) {
                return detail::concat(p.auth_data2);
            } else if constexpr (std::is_same_v<T, VerifyFailed>) {
                Bytes b(16, 0);
                const std::string_view s = to_string(p.reason);
                std::copy(s.begin(), s.end(), b.begin());
                return b;
            } else if constexpr (std::is_same_v<T, ControlData>) {
                return detail::concat(p.data);
            } else if constexpr (std::is_same_v<T, ControlOk>) {
                return {};
            } else {
                return detail::concat(p.data);
            }
        },
        m);
    Bytes out;
    out.reserve(payload.size() + 1);
    out.push_back(static_cast<Byte>(kind_of(m)));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

inline Message decode(ByteView wire) {
    if (wire.empty()) throw DecodeError("empty message");
    const Byte tag = wire[0];
    if (tag < 1 || tag > 8) throw DecodeError("unknown message kind tag " + std::to_string(tag));
    const auto kind = static_cast<MessageKind>(tag);
    const ByteView body = wire.subspan(1);
    if (body.size() != payload_size(kind))
        throw DecodeError(std::string{"wrong payload length for "} + std::string{to_string(kind)});

    switch (kind) {
        case MessageKind::Adv: return Adv{to_array<16>(body)};
        case MessageKind::AuthRequest: {
            if (body[16] > 1) throw DecodeError("cert_request flag must be 0 or 1");
            return AuthRequest{to_array<16>(body.first(16)), body[16] == 1};
        }
        case MessageKind::AuthResponse:
            return AuthResponse{to_array<auth::Certificate::kEncodedSize>(body.first(auth::Certificate::kEncodedSize)),
                                to_array<16>(body.subspan(auth::Certificate::kEncodedSize))};
        case MessageKind::VerifyOk: return VerifyOk{to_array<16>(body)};
        case MessageKind::VerifyFailed: {
            for (FailureReason r : {FailureReason::ErrorRand1, FailureReason::CrtError}) {
                Bytes expected(16, 0);
                const std::string_view s = to_string(r);
                std::copy(s.begin(), s.end(), expected.begin());
                if (std::equal(expected.begin(), expected.end(), body.begin())) return VerifyFailed{r};
            }
            throw DecodeError("unknown VERIFY_FAILED reason");
        }
        case MessageKind::ControlData: return ControlData{to_array<32>(body)};
        case MessageKind::ControlOk: return ControlOk{};
        case MessageKind::CredUpdate: return CredUpdate{to_array<256>(body)};
    }
    throw DecodeError("unreachable");
}

/// Fixed 16-byte control command field.
enum class Command : std::uint8_t { Lock = 1, Unlock = 2, Trunk = 3 };

inline Block encode_command(Command c) {
    Block b{};
    b[0] = static_cast<Byte>(c);
    return b;
}

inline std::optional<Command> decode_command(const Block& b) {
    for (std::size_t i = 1; i < b.size(); ++i)
        if (b[i] != 0) return std::nullopt;
    if (b[0] < 1 || b[0] > 3) return std::nullopt;
    return static_cast<Command>(b[0]);
}

constexpr std::string_view to_string(Command c) {
    switch (c) {
        case Command::Lock: return "LOCK";
        case Command::Unlock: return "UNLOCK";
        case Command::Trunk: return "TRUNK";
    }
    return "?";
}

}  // namespace rke::proto
