#include <rke/linkctl.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace rke;

namespace {

LinkThresholds narrow_th() { return LinkThresholds{-55.0, -70.0, PdrPercent{95}, PdrPercent{85}}; }

}  // namespace

TEST(InitialLink, CodedAtFullPower) {
    const LinkParams a = initial_link();
    const LinkParams b = initial_link();
    EXPECT_EQ(a.phy, PhyMode::PhyCoded);
    EXPECT_EQ(a.txp.dbm(), 8);
    EXPECT_EQ(a.phy, b.phy);
    EXPECT_EQ(a.txp, b.txp);
    EXPECT_NO_THROW(a.validate());
}

TEST(Adapt, GoodLinkShedsPower) {
    const auto [phy, txp] = adapt({PhyMode::Phy2M, TxPower{0}, -40, PdrPercent{99}}, narrow_th());
    EXPECT_EQ(phy, PhyMode::Phy2M);
    EXPECT_EQ(txp.dbm(), -4);
}

TEST(Adapt, GoodLinkAtFloorMovesTo2M) {
    const auto [phy, txp] = adapt({PhyMode::PhyCoded, TxPower{-20}, -40, PdrPercent{99}}, narrow_th());
    EXPECT_EQ(phy, PhyMode::Phy2M);
    EXPECT_EQ(txp.dbm(), -20);
}

TEST(Adapt, BadLinkAtCeilingFallsBackToCoded) {
    const auto [phy, txp] = adapt({PhyMode::Phy2M, TxPower{8}, -90, PdrPercent{60}}, narrow_th());
    EXPECT_EQ(phy, PhyMode::PhyCoded);
    EXPECT_EQ(txp.dbm(), 8);
}

TEST(Adapt, BadLinkAddsPower) {
    const auto [phy, txp] = adapt({PhyMode::Phy1M, TxPower{-12}, -90, PdrPercent{60}}, narrow_th());
    EXPECT_EQ(phy, PhyMode::Phy1M);
    EXPECT_EQ(txp.dbm(), -8);
}

TEST(Adapt, MiddleBandUnchanged) {
    const auto [phy, txp] = adapt({PhyMode::Phy1M, TxPower{4}, -60, PdrPercent{90}}, narrow_th());
    EXPECT_EQ(phy, PhyMode::Phy1M);
    EXPECT_EQ(txp.dbm(), 4);
}

TEST(Adapt, StrictInequalities) {
    // Exactly on a threshold is not "above" or "below" it.
    EXPECT_EQ(adapt({PhyMode::Phy2M, TxPower{0}, -55, PdrPercent{99}}, narrow_th()).second.dbm(), 0);
    EXPECT_EQ(adapt({PhyMode::Phy2M, TxPower{0}, -40, PdrPercent{95}}, narrow_th()).second.dbm(), 0);
    EXPECT_EQ(adapt({PhyMode::Phy2M, TxPower{0}, -70, PdrPercent{10}}, narrow_th()).second.dbm(), 0);
}

TEST(TxPowerGrid, OnlyGridValues) {
    for (int d = -30; d <= 20; ++d) EXPECT_EQ(TxPower::is_valid(d), d >= -20 && d <= 8 && (d + 20) % 4 == 0) << d;
    EXPECT_THROW(TxPower{9}, InvalidArgument);
    EXPECT_THROW(TxPower{-24}, InvalidArgument);
}

TEST(LinkParams, RssiSanityBounds) {
    EXPECT_THROW(adapt({PhyMode::Phy2M, TxPower{0}, -121, PdrPercent{50}}, narrow_th()), InvalidArgument);
    EXPECT_THROW(adapt({PhyMode::Phy2M, TxPower{0}, 21, PdrPercent{50}}, narrow_th()), InvalidArgument);
}

TEST(Thresholds, OrderingEnforced) {
    EXPECT_THROW((LinkThresholds{-70, -55, PdrPercent{95}, PdrPercent{85}}.validate()), InvalidArgument);
    EXPECT_THROW((LinkThresholds{-55, -70, PdrPercent{85}, PdrPercent{95}}.validate()), InvalidArgument);
}

TEST(PhyNames, RoundTrip) {
    for (PhyMode m : kAllPhyModes) EXPECT_EQ(parse_phy(to_string(m)), m);
    EXPECT_FALSE(parse_phy("PHY_4M").has_value());
}

TEST(Adapt, ExhaustiveSweepMatchesOracle) {
    for (const LinkThresholds& th : {narrow_th(), LinkThresholds{-50.0, -75.0, PdrPercent{90}, PdrPercent{80}}}) {
        for (int txp : TxPower::grid())
            for (PhyMode phy : kAllPhyModes)
                for (int rssi = -110; rssi <= 0; rssi += 5)
                    for (int pdr = 0; pdr <= 100; pdr += 5) {
                        const LinkParams in{phy, TxPower{txp}, static_cast<double>(rssi), PdrPercent{static_cast<double>(pdr)}};
                        const auto got = adapt(in, th);
                        const auto want = oracle::adapt(phy, txp, rssi, pdr, th);
                        ASSERT_EQ(got.first, want.first);
                        ASSERT_EQ(got.second.dbm(), want.second);
                        // at most one of PHY/TXP changes; output stays on the grid
                        ASSERT_FALSE(got.first != phy && got.second.dbm() != txp);
                        ASSERT_TRUE(TxPower::is_valid(got.second.dbm()));
                        ASSERT_EQ(adapt(in, th), got);
                    }
    }
}
