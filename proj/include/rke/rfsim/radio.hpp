#pragma once

// Radio environment models: log-distance path loss, per-PHY delivery curves,
// and Wi-Fi interference footprints with a capture threshold.

#include <rke/chanqual.hpp>
#include <rke/hopctl.hpp>
#include <rke/linkctl.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace rke::sim {

struct PathLossParams {
    double pl0_db = 40.0;
    double exponent = 2.5;
    double distance_m = 1.0;

    void validate() const {
        if (!(distance_m > 0.0)) throw InvalidArgument("path_loss.distance_m must be > 0");
        if (!(exponent >= 1.5 && exponent <= 4.5)) throw InvalidArgument("path_loss.exponent must lie in [1.5, 4.5]");
    }
};

/// RSSI = TXP - (PL0 + 10 n log10(d / 1 m)).
inline double rssi_at(TxPower txp, const PathLossParams& pl) {
    pl.validate();
    return static_cast<double>(txp.dbm()) - (pl.pl0_db + 10.0 * pl.exponent * std::log10(pl.distance_m));
}

/// Delivery probability vs RSSI: zero at or below the PHY's sensitivity floor, a linear
/// ramp up to `p_max` at `saturation_dbm`, flat above.
struct PhyCurve {
    double floor_2m_dbm = -78.0;
    double floor_1m_dbm = -90.0;
    double floor_coded_dbm = -100.0;
    double saturation_dbm = -55.0;
    double p_max = 0.995;

    double floor(PhyMode phy) const {
        switch (phy) {
            case PhyMode::Phy2M: return floor_2m_dbm;
            case PhyMode::Phy1M: return floor_1m_dbm;
            case PhyMode::PhyCoded: return floor_coded_dbm;
        }
        return floor_1m_dbm;
    }

    void validate() const {
        for (PhyMode m : kAllPhyModes)
            if (!(floor(m) < saturation_dbm)) throw InvalidArgument("curve: every PHY floor must lie below saturation_dbm");
        if (!(p_max > 0.0 && p_max <= 1.0)) throw InvalidArgument("curve.p_max must lie in (0, 1]");
    }
};

inline double base_pdr(PhyMode phy, double rssi_dbm, const PhyCurve& curve) {
    const double lo = curve.floor(phy);
    if (rssi_dbm <= lo) return 0.0;
    if (rssi_dbm >= curve.saturation_dbm) return curve.p_max;
    return (rssi_dbm - lo) / (curve.saturation_dbm - lo) * curve.p_max;
}

struct Interferer {
    int wifi_channel = 1;
    double rssi_dbm = -55.0;
    double duty_cycle = 0.6;
    std::int64_t start_event = 0;
    std::int64_t end_event = std::numeric_limits<std::int64_t>::max();  // exclusive

    bool active(std::int64_t event) const { return start_event <= event && event < end_event; }

    void validate() const {
        if (wifi_channel < 1 || wifi_channel > 13) throw InvalidArgument("interferer.wifi_channel must lie in [1, 13]");
        if (!(duty_cycle >= 0.0 && duty_cycle <= 1.0)) throw InvalidArgument("interferer.duty_cycle must lie in [0, 1]");
        if (!(start_event < end_event)) throw InvalidArgument("interferer active interval is empty");
    }
};

inline constexpr int wifi_center_mhz(int wifi_channel) { return 2412 + 5 * (wifi_channel - 1); }

/// BLE data channels degraded by a 2.4 GHz Wi-Fi channel: the channel c whose lower
/// edge the Wi-Fi center falls on, widened to [c-5, c+4] and clamped to 0..36.
inline std::vector<ChannelIndex> affected_ble_channels(int wifi_channel) {
    if (wifi_channel < 1 || wifi_channel > 13) throw InvalidArgument("wifi_channel must lie in [1, 13]");
    const int c = (wifi_center_mhz(wifi_channel) - 2404) / 2;
    std::vector<ChannelIndex> out;
    for (int k = std::max(0, c - 5); k <= std::min(kDataChannels - 1, c + 4); ++k) out.emplace_back(k);
    return out;
}

inline ChannelMap footprint_map(int wifi_channel) {
    ChannelMap m;
    for (ChannelIndex c : affected_ble_channels(wifi_channel)) m.enable(c);
    return m;
}

/// Per-packet success probability. Each active interferer whose footprint covers the
/// channel and whose signal-to-interference ratio is below `capture_db` blocks the
/// packet with probability equal to its duty cycle; interferers compose multiplicatively.
inline double success_probability(ChannelIndex channel, PhyMode phy, TxPower txp, const PathLossParams& pl,
                                  std::span<const Interferer> interferers, const PhyCurve& curve, double capture_db,
                                  std::int64_t event = 0) {
    const double signal = rssi_at(txp, pl);
    double p = base_pdr(phy, signal, curve);
    for (const Interferer& i : interferers) {
        if (!i.active(event)) continue;
        if (!footprint_map(i.wifi_channel).enabled(channel)) continue;
        if (signal - i.rssi_dbm < capture_db) p *= 1.0 - i.duty_cycle;
    }
    return p;
}

}  // namespace rke::sim
