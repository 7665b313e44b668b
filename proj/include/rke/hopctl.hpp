#pragma once

// Adaptive frequency hopping: channel-map maintenance and per-event channel selection.

#include <rke/chanqual.hpp>
#include <rke/common.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

namespace rke {

/// 37-bit enable map over the BLE data channels. Wire form is 5 bytes, channel i at
/// bit (i % 8) of byte (i / 8); the three spare bits of byte 4 are always zero.
class ChannelMap {
public:
    static constexpr std::uint64_t kMask = (std::uint64_t{1} << kDataChannels) - 1;

    constexpr ChannelMap() = default;

    static constexpr ChannelMap all() { return from_bits(kMask); }
    static constexpr ChannelMap none() { return ChannelMap{}; }
    static constexpr ChannelMap from_bits(std::uint64_t bits) {
        ChannelMap m;
        m.bits_ = bits & kMask;
        return m;
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool enabled(ChannelIndex c) const { return (bits_ >> c.value()) & 1u; }
    constexpr void enable(ChannelIndex c) { bits_ |= std::uint64_t{1} << c.value(); }
    constexpr void disable(ChannelIndex c) { bits_ &= ~(std::uint64_t{1} << c.value()); }
    constexpr int count() const { return std::popcount(bits_); }

    /// Enabled channels in ascending order.
    std::vector<ChannelIndex> channels() const {
        std::vector<ChannelIndex> out;
        for (int c = 0; c < kDataChannels; ++c)
            if ((bits_ >> c) & 1u) out.emplace_back(c);
        return out;
    }

    friend constexpr bool operator==(ChannelMap, ChannelMap) = default;

private:
    std::uint64_t bits_ = 0;
};

using PackedChannelMap = std::array<Byte, 5>;

constexpr PackedChannelMap encode_map(ChannelMap map) {
    PackedChannelMap out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Byte>((map.bits() >> (8 * i)) & 0xff);
    return out;
}

constexpr ChannelMap decode_map(const PackedChannelMap& bytes) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) bits |= std::uint64_t{bytes[i]} << (8 * i);
    return ChannelMap::from_bits(bits);
}

constexpr int enabled_count(ChannelMap map) { return map.count(); }

struct HopThresholds {
    PdrPercent pdr_threshold{95.0};
    int channel_threshold = 10;

    void validate() const {
        if (channel_threshold < 2 || channel_threshold > kDataChannels)
            throw InvalidArgument("channel_threshold must lie in [2, 37]");
    }
};

/// One adaptation step over the channel map.
///
/// A map that has shrunk below `channel_threshold` is first reset to all 37
/// channels; the windowed PDR filter then runs against that base, so the
/// reset and the blacklisting happen in the same call.
inline ChannelMap update_channel_map(const PdrTracker& tracker, ChannelMap last_map, const HopThresholds& th) {
    th.validate();
    ChannelMap base = enabled_count(last_map) < th.channel_threshold ? ChannelMap::all() : last_map;
    ChannelMap result = base;
    for (int c = 0; c < kDataChannels; ++c) {
        const ChannelIndex ch{c};
        if (tracker.pdr_latest(ch) < th.pdr_threshold) result.disable(ch);
    }
    return result;
}

/// CSA#1-style hop state: the unmapped channel advances by a fixed increment modulo 37.
class HopState {
public:
    static constexpr int kDefaultIncrement = 7;

    explicit HopState(int hop_increment = kDefaultIncrement, int last_unmapped = 0)
        : last_unmapped_(last_unmapped), hop_increment_(hop_increment) {
        if (hop_increment < 5 || hop_increment > 16) throw InvalidArgument("hop_increment must lie in [5, 16]");
        if (last_unmapped < 0 || last_unmapped >= kDataChannels) throw InvalidArgument("last_unmapped out of range");
    }

    int last_unmapped() const { return last_unmapped_; }
    int hop_increment() const { return hop_increment_; }

private:
    int last_unmapped_;
    int hop_increment_;
};

/// Next data channel. A disabled unmapped channel is remapped onto the enabled set,
/// indexed by (unmapped mod enabled_count) in ascending channel order.
inline std::pair<ChannelIndex, HopState> select_channel(const HopState& hop, ChannelMap map) {
    const int used = enabled_count(map);
    if (used == 0) throw InvalidState("select_channel: channel map has no enabled channels");

    const int unmapped = (hop.last_unmapped() + hop.hop_increment()) % kDataChannels;
    const HopState next{hop.hop_increment(), unmapped};
    if (map.enabled(ChannelIndex{unmapped})) return {ChannelIndex{unmapped}, next};

    int target = unmapped % used;
    for (int c = 0; c < kDataChannels; ++c) {
        if (!map.enabled(ChannelIndex{c})) continue;
        if (target-- == 0) return {ChannelIndex{c}, next};
    }
    throw InvalidState("select_channel: remap index out of range");  // unreachable
}

}  // namespace rke
