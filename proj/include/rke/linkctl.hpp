#pragma once

// PHY mode and transmit power adaptation driven by RSSI and PDR.

#include <rke/chanqual.hpp>
#include <rke/common.hpp>

#include <algorithm>
#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace rke {

enum class PhyMode { Phy1M, Phy2M, PhyCoded };

inline constexpr std::array<PhyMode, 3> kAllPhyModes{PhyMode::Phy1M, PhyMode::Phy2M, PhyMode::PhyCoded};

constexpr std::string_view to_string(PhyMode mode) {
    switch (mode) {
        case PhyMode::Phy1M: return "PHY_1M";
        case PhyMode::Phy2M: return "PHY_2M";
        case PhyMode::PhyCoded: return "PHY_CODED";
    }
    return "?";
}

inline std::optional<PhyMode> parse_phy(std::string_view name) {
    for (PhyMode m : kAllPhyModes)
        if (to_string(m) == name) return m;
    return std::nullopt;
}

/// Transmit power on the 4 dB grid {-20, -16, ..., 8} dBm.
class TxPower {
public:
    static constexpr int kMinDbm = -20;
    static constexpr int kMaxDbm = 8;
    static constexpr int kStepDb = 4;

    constexpr explicit TxPower(int dbm) : dbm_(dbm) {
        if (!is_valid(dbm)) throw InvalidArgument("TX power not on the {-20..8} dBm 4 dB grid: " + std::to_string(dbm));
    }

    static constexpr bool is_valid(int dbm) {
        return dbm >= kMinDbm && dbm <= kMaxDbm && (dbm - kMinDbm) % kStepDb == 0;
    }

    static constexpr std::array<int, 8> grid() { return {-20, -16, -12, -8, -4, 0, 4, 8}; }

    constexpr int dbm() const { return dbm_; }

    friend constexpr auto operator<=>(TxPower, TxPower) = default;

private:
    int dbm_;
};

struct LinkThresholds {
    double rssi_high = -55.0;
    double rssi_low = -70.0;
    PdrPercent pdr_high{95.0};
    PdrPercent pdr_low{85.0};

    void validate() const {
        if (!(rssi_low < rssi_high)) throw InvalidArgument("rssi_low must be below rssi_high");
        if (!(pdr_low < pdr_high)) throw InvalidArgument("pdr_low must be below pdr_high");
    }
};

struct LinkParams {
    PhyMode phy = PhyMode::PhyCoded;
    TxPower txp{8};
    double rssi_current = -50.0;
    PdrPercent pdr_current{100.0};

    void validate() const {
        if (!(rssi_current >= -120.0 && rssi_current <= 20.0)) throw InvalidArgument("rssi_current outside [-120, 20] dBm");
    }
};

/// Widest-range starting point: coded PHY at full power.
constexpr LinkParams initial_link() { return LinkParams{PhyMode::PhyCoded, TxPower{8}, -50.0, PdrPercent{100.0}}; }

/// One adaptation step. A good link first sheds power, then moves to 2M once at the
/// power floor; a bad link first adds power, then falls back to coded PHY at the ceiling.
/// At most one of (PHY, TXP) changes per call.
inline std::pair<PhyMode, TxPower> adapt(const LinkParams& link, const LinkThresholds& th) {
    link.validate();
    th.validate();
    const int txp = link.txp.dbm();

    if (link.rssi_current > th.rssi_high && link.pdr_current > th.pdr_high) {
        if (txp > TxPower::kMinDbm) return {link.phy, TxPower{txp - TxPower::kStepDb}};
        return {PhyMode::Phy2M, link.txp};
    }
    if (link.rssi_current < th.rssi_low && link.pdr_current < th.pdr_low) {
        if (txp < TxPower::kMaxDbm) return {link.phy, TxPower{txp + TxPower::kStepDb}};
        return {PhyMode::PhyCoded, link.txp};
    }
    return {link.phy, link.txp};
}

}  // namespace rke
