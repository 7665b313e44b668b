#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rke {

using Byte = std::uint8_t;
using Bytes = std::vector<Byte>;
using ByteView = std::span<const Byte>;

/// One AES block; also the width of keys, nonces and pseudo-IDs.
using Block = std::array<Byte, 16>;

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidState : std::logic_error {
    using std::logic_error::logic_error;
};

/// Malformed wire or certificate encoding.
struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ciphertext that does not decrypt to a well-formed plaintext (bad padding).
struct DecryptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string to_hex(ByteView bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (Byte b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

inline Bytes from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
        out[i] = static_cast<Byte>((hi << 4) | lo);
    }
    return out;
}

template <std::size_t N>
std::array<Byte, N> to_array(ByteView bytes) {
    if (bytes.size() != N) throw DecodeError("unexpected byte length");
    std::array<Byte, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = bytes[i];
    return out;
}

template <std::size_t N>
constexpr std::array<Byte, N> xor_bytes(const std::array<Byte, N>& a, const std::array<Byte, N>& b) {
    std::array<Byte, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = static_cast<Byte>(a[i] ^ b[i]);
    return out;
}

}  // namespace rke
