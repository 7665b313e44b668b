#include <rke/hopctl.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace rke;

namespace {

ChannelMap map_of(std::initializer_list<int> chans) {
    ChannelMap m;
    for (int c : chans) m.enable(ChannelIndex{c});
    return m;
}

int naive_count(ChannelMap m) {
    int n = 0;
    for (int c = 0; c < 64; ++c) n += static_cast<int>((m.bits() >> c) & 1u);
    return n;
}

}  // namespace

TEST(Encode, AllEnabled) { EXPECT_EQ(encode_map(ChannelMap::all()), (PackedChannelMap{0xFF, 0xFF, 0xFF, 0xFF, 0x1F})); }

TEST(Encode, OnlyChannelZero) { EXPECT_EQ(encode_map(map_of({0})), (PackedChannelMap{0x01, 0, 0, 0, 0})); }

TEST(Encode, FirstNineDisabled) {
    ChannelMap m = ChannelMap::all();
    for (int c = 0; c <= 8; ++c) m.disable(ChannelIndex{c});
    const PackedChannelMap packed = encode_map(m);
    EXPECT_EQ(packed, (PackedChannelMap{0x00, 0xFE, 0xFF, 0xFF, 0x1F}));
    EXPECT_EQ(decode_map(packed), m);
    EXPECT_EQ(enabled_count(m), 28);
}

TEST(Decode, MasksSpareBits) {
    EXPECT_EQ(decode_map({0xFF, 0xFF, 0xFF, 0xFF, 0xFF}), ChannelMap::all());
    EXPECT_EQ(encode_map(decode_map({0xFF, 0xFF, 0xFF, 0xFF, 0xFF}))[4], 0x1F);
}

TEST(Decode, LowFive) {
    EXPECT_EQ(decode_map({0x1F, 0, 0, 0, 0}), map_of({0, 1, 2, 3, 4}));
    EXPECT_EQ(enabled_count(decode_map({0x00, 0x00, 0x00, 0x00, 0x1F})), 5);
    EXPECT_EQ(enabled_count(ChannelMap::all()), 37);
}

TEST(Decode, RoundTripRandomMaps) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const ChannelMap m = ChannelMap::from_bits(rng());
        EXPECT_EQ(decode_map(encode_map(m)), m);
        EXPECT_EQ(enabled_count(m), naive_count(m));
        EXPECT_EQ(encode_map(m)[4] & 0xE0, 0);
        PackedChannelMap raw{};
        for (auto& b : raw) b = static_cast<Byte>(rng());
        EXPECT_EQ(encode_map(decode_map(raw))[4], raw[4] & 0x1F);
    }
}

TEST(UpdateMap, ResetWhenBelowThreshold) {
    PdrTracker t;
    const ChannelMap last = map_of({0, 1, 2, 3, 4, 5, 6, 7});
    EXPECT_EQ(update_channel_map(t, last, HopThresholds{PdrPercent{95}, 10}), ChannelMap::all());
}

TEST(UpdateMap, DisablesExactlyTheWeakChannel) {
    PdrTracker t(10);
    for (int i = 0; i < 10; ++i) t.record(ChannelIndex{2}, i != 0);  // 90%
    for (int i = 0; i < 10; ++i) t.record(ChannelIndex{3}, true);
    ChannelMap expected = ChannelMap::all();
    expected.disable(ChannelIndex{2});
    EXPECT_EQ(update_channel_map(t, ChannelMap::all(), HopThresholds{}), expected);
}

TEST(UpdateMap, AllGoodLeavesBase) {
    PdrTracker t;
    for (int c = 0; c < kDataChannels; ++c) t.record(ChannelIndex{c}, true);
    ChannelMap base = ChannelMap::all();
    base.disable(ChannelIndex{30});
    EXPECT_EQ(update_channel_map(t, base, HopThresholds{}), base);
}

TEST(UpdateMap, PdrAtThresholdIsKept) {
    PdrTracker t(20);
    for (int i = 0; i < 20; ++i) t.record(ChannelIndex{7}, i != 0);  // exactly 95%
    EXPECT_TRUE(update_channel_map(t, ChannelMap::all(), HopThresholds{}).enabled(ChannelIndex{7}));
}

TEST(UpdateMap, ThresholdValidation) {
    PdrTracker t;
    EXPECT_THROW(update_channel_map(t, ChannelMap::all(), HopThresholds{PdrPercent{95}, 1}), InvalidArgument);
    EXPECT_THROW(update_channel_map(t, ChannelMap::all(), HopThresholds{PdrPercent{95}, 38}), InvalidArgument);
}

// Independent transcription: decide the base by counting bits, then test every channel's
// window by re-deriving its PDR from the raw marks.
TEST(UpdateMap, MatchesBruteForceFilter) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 30);
        PdrTracker t(w);
        std::vector<double> quality(kDataChannels);
        for (double& q : quality) q = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
        const int events = static_cast<int>(rng() % 600);
        for (int e = 0; e < events; ++e) {
            const int c = static_cast<int>(rng() % kDataChannels);
            t.record(ChannelIndex{c}, std::uniform_real_distribution<double>(0, 1)(rng) < quality[c]);
        }
        const ChannelMap last = ChannelMap::from_bits(rng() & rng());
        const HopThresholds th{PdrPercent{static_cast<double>(rng() % 101)}, 2 + static_cast<int>(rng() % 36)};

        std::uint64_t bits = naive_count(last) < th.channel_threshold ? (std::uint64_t{1} << 37) - 1 : last.bits();
        for (int c = 0; c < kDataChannels; ++c) {
            const auto marks = t.window(ChannelIndex{c});
            int ok = 0;
            for (auto m : marks) ok += m > 0;
            const double pdr = marks.empty() ? 100.0 : 100.0 * ok / static_cast<double>(marks.size());
            if (pdr < th.pdr_threshold.value()) bits &= ~(std::uint64_t{1} << c);
        }
        ASSERT_EQ(update_channel_map(t, last, th).bits(), bits) << "trial " << trial;
    }
}

TEST(SelectChannel, DirectHop) {
    const auto [ch, next] = select_channel(HopState{7, 0}, ChannelMap::all());
    EXPECT_EQ(ch.value(), 7);
    EXPECT_EQ(next.last_unmapped(), 7);
}

TEST(SelectChannel, Wraparound) {
    EXPECT_EQ(select_channel(HopState{7, 35}, ChannelMap::all()).first.value(), 5);
}

TEST(SelectChannel, RemapOntoEnabledSet) {
    const auto [ch, next] = select_channel(HopState{7, 0}, map_of({1, 3}));
    EXPECT_EQ(ch.value(), 3);
    EXPECT_EQ(next.last_unmapped(), 7);  // the unmapped channel drives the sequence
}

TEST(SelectChannel, EmptyMapThrows) { EXPECT_THROW(select_channel(HopState{}, ChannelMap::none()), InvalidState); }

TEST(SelectChannel, IncrementRange) {
    EXPECT_THROW(HopState{4}, InvalidArgument);
    EXPECT_THROW(HopState{17}, InvalidArgument);
    EXPECT_NO_THROW(HopState{16});
}

TEST(SelectChannel, RemapTableBruteForce) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        ChannelMap m = ChannelMap::from_bits(rng() & rng());
        if (m.count() == 0) m.enable(ChannelIndex{static_cast<int>(rng() % 37)});
        const int inc = 5 + static_cast<int>(rng() % 12);
        HopState h{inc, static_cast<int>(rng() % 37)};
        for (int step = 0; step < 50; ++step) {
            const int unmapped = (h.last_unmapped() + inc) % 37;
            std::vector<int> used;
            for (int c = 0; c < 37; ++c)
                if ((m.bits() >> c) & 1u) used.push_back(c);
            const int expected = ((m.bits() >> unmapped) & 1u) ? unmapped : used[unmapped % used.size()];
            auto [ch, next] = select_channel(h, m);
            ASSERT_EQ(ch.value(), expected);
            ASSERT_TRUE(m.enabled(ch));
            h = next;
        }
    }
}

TEST(SelectChannel, FullMapVisitsEveryChannelOncePerCycle) {
    for (int inc = 5; inc <= 16; ++inc) {
        HopState h{inc, 0};
        std::set<int> seen;
        for (int i = 0; i < 37; ++i) {
            auto [ch, next] = select_channel(h, ChannelMap::all());
            seen.insert(ch.value());
            h = next;
        }
        EXPECT_EQ(seen.size(), 37u) << "increment " << inc;
    }
}
