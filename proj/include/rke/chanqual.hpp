#pragma once

// Per-channel packet delivery rate estimation.
//
// Each BLE data channel keeps a ring of its last `window_size` transmission
// outcomes (+1 delivered, -1 lost) plus lifetime ok/error counters. The
// windowed rate is the real-time quality signal; the lifetime rate is the
// whole-session average.

#include <rke/common.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace rke {

inline constexpr int kDataChannels = 37;

/// BLE data channel 0..36 (2404 + 2*index MHz). Advertising channels are not representable.
class ChannelIndex {
public:
    constexpr explicit ChannelIndex(int index) : index_(index) {
        if (index < 0 || index >= kDataChannels)
            throw InvalidArgument("channel index out of range [0, 36]: " + std::to_string(index));
    }

    constexpr int value() const { return index_; }
    constexpr int center_mhz() const { return 2404 + 2 * index_; }

    friend constexpr auto operator<=>(ChannelIndex, ChannelIndex) = default;

private:
    int index_;
};

/// Delivery rate as a percentage in [0, 100].
class PdrPercent {
public:
    constexpr explicit PdrPercent(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 100.0)) throw InvalidArgument("PDR percentage outside [0, 100]");
    }

    constexpr double value() const { return value_; }
    constexpr double fraction() const { return value_ / 100.0; }

    friend constexpr auto operator<=>(PdrPercent, PdrPercent) = default;

private:
    double value_;
};

/// Ratio helper shared by the windowed and lifetime estimators. No samples reads as 100%.
constexpr PdrPercent delivery_percent(std::uint64_t ok, std::uint64_t failed) {
    const std::uint64_t n = ok + failed;
    if (n == 0) return PdrPercent{100.0};
    return PdrPercent{static_cast<double>(ok) / static_cast<double>(n) * 100.0};
}

class PdrTracker {
public:
    static constexpr int kDefaultWindow = 25;

    explicit PdrTracker(int window_size = kDefaultWindow) {
        if (window_size < 1) throw InvalidArgument("window_size must be >= 1");
        window_size_ = static_cast<std::size_t>(window_size);
        for (auto& ring : rings_) ring.marks.assign(window_size_, 0);
    }

    int window_size() const { return static_cast<int>(window_size_); }

    void record(ChannelIndex channel, bool ok) {
        Ring& ring = rings_[slot(channel)];
        const std::int8_t mark = ok ? 1 : -1;
        if (ring.count == window_size_) {
            if (ring.marks[ring.head] > 0) --ring.window_ok;
        } else {
            ++ring.count;
        }
        ring.marks[ring.head] = mark;
        if (ok) ++ring.window_ok;
        ring.head = (ring.head + 1) % window_size_;

        if (ok)
            ++total_oks_[slot(channel)];
        else
            ++total_errors_[slot(channel)];
    }

    PdrPercent pdr_latest(ChannelIndex channel) const {
        const Ring& ring = rings_[slot(channel)];
        return delivery_percent(ring.window_ok, ring.count - ring.window_ok);
    }

    PdrPercent pdr_total(ChannelIndex channel) const {
        return delivery_percent(total_oks_[slot(channel)], total_errors_[slot(channel)]);
    }

    std::vector<PdrPercent> pdr_latest_all() const {
        std::vector<PdrPercent> out;
        out.reserve(kDataChannels);
        for (int c = 0; c < kDataChannels; ++c) out.push_back(pdr_latest(ChannelIndex{c}));
        return out;
    }

    /// Window contents, oldest first. Empty slots are omitted.
    std::vector<std::int8_t> window(ChannelIndex channel) const {
        const Ring& ring = rings_[slot(channel)];
        std::vector<std::int8_t> out;
        out.reserve(ring.count);
        const std::size_t start = (ring.head + window_size_ - ring.count) % window_size_;
        for (std::size_t i = 0; i < ring.count; ++i) out.push_back(ring.marks[(start + i) % window_size_]);
        return out;
    }

    std::uint64_t window_oks(ChannelIndex channel) const { return rings_[slot(channel)].window_ok; }
    std::uint64_t window_count(ChannelIndex channel) const { return rings_[slot(channel)].count; }
    std::uint64_t total_oks(ChannelIndex channel) const { return total_oks_[slot(channel)]; }
    std::uint64_t total_errors(ChannelIndex channel) const { return total_errors_[slot(channel)]; }

    /// Forget the windowed history of one channel; lifetime counters are kept.
    void clear_window(ChannelIndex channel) {
        Ring& ring = rings_[slot(channel)];
        ring.marks.assign(window_size_, 0);
        ring.head = 0;
        ring.count = 0;
        ring.window_ok = 0;
    }

private:
    struct Ring {
        std::vector<std::int8_t> marks;
        std::size_t head = 0;
        std::size_t count = 0;
        std::uint64_t window_ok = 0;
    };

    static std::size_t slot(ChannelIndex c) { return static_cast<std::size_t>(c.value()); }

    std::size_t window_size_ = kDefaultWindow;
    std::array<Ring, kDataChannels> rings_{};
    std::array<std::uint64_t, kDataChannels> total_oks_{};
    std::array<std::uint64_t, kDataChannels> total_errors_{};
};

}  // namespace rke
