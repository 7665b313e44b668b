#pragma once

// One simulated BLE connection. Each connection event hops to a channel, draws the
// packet outcome, and feeds the PDR tracker; every `adaptation_period` events the
// channel map and PHY/TXP are re-evaluated when adaptation is on.

#include <rke/chanqual.hpp>
#include <rke/hopctl.hpp>
#include <rke/linkctl.hpp>
#include <rke/rfsim/radio.hpp>
#include <rke/rfsim/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace rke::sim {

struct SimConfig {
    std::uint64_t seed = 1;
    std::uint64_t node_id = 0;
    bool adaptation = true;
    int window_size = PdrTracker::kDefaultWindow;
    HopThresholds hop{};
    int adaptation_period = 25;
    int hop_increment = HopState::kDefaultIncrement;
    PhyMode phy = PhyMode::PhyCoded;
    TxPower txp{8};
    LinkThresholds link_thresholds{};
    PathLossParams path_loss{};
    PhyCurve curve{};
    double capture_db = 8.0;
    std::vector<Interferer> interferers;

    void validate() const {
        if (window_size < 1) throw InvalidArgument("window_size must be >= 1");
        if (adaptation_period < 1) throw InvalidArgument("adaptation_period must be >= 1");
        hop.validate();
        link_thresholds.validate();
        path_loss.validate();
        curve.validate();
        for (const Interferer& i : interferers) i.validate();
    }
};

struct EventOutcome {
    std::int64_t event_index = 0;
    ChannelIndex channel{0};
    PhyMode phy = PhyMode::PhyCoded;
    TxPower txp{8};
    double rssi = 0.0;
    bool success = false;
};

class LinkSimulator {
public:
    explicit LinkSimulator(SimConfig cfg)
        : cfg_((cfg.validate(), std::move(cfg))),
          rng_(cfg_.seed, cfg_.node_id),
          tracker_(cfg_.window_size),
          hop_(cfg_.hop_increment),
          phy_(cfg_.phy),
          txp_(cfg_.txp) {}

    EventOutcome run_connection_event() {
        const auto [channel, next_hop] = select_channel(hop_, map_);
        hop_ = next_hop;

        const double rssi = rssi_at(txp_, cfg_.path_loss);
        const double p = success_probability(channel, phy_, txp_, cfg_.path_loss, cfg_.interferers, cfg_.curve,
                                             cfg_.capture_db, event_);
        const bool ok = rng_.uniform(static_cast<std::uint64_t>(event_)) < p;
        tracker_.record(channel, ok);

        const EventOutcome out{event_, channel, phy_, txp_, rssi, ok};
        period_rssi_sum_ += rssi;
        ++period_events_;
        ++event_;

        if (cfg_.adaptation && event_ % cfg_.adaptation_period == 0) adapt_now();
        return out;
    }

    /// Windowed PDR aggregated over the channels currently in the map.
    PdrPercent pdr_latest_overall() const {
        std::uint64_t ok = 0, n = 0;
        for (ChannelIndex c : map_.channels()) {
            ok += tracker_.window_oks(c);
            n += tracker_.window_count(c);
        }
        return delivery_percent(ok, n - ok);
    }

    /// Lifetime PDR over every packet sent so far.
    PdrPercent pdr_total_overall() const {
        std::uint64_t ok = 0, failed = 0;
        for (int c = 0; c < kDataChannels; ++c) {
            ok += tracker_.total_oks(ChannelIndex{c});
            failed += tracker_.total_errors(ChannelIndex{c});
        }
        return delivery_percent(ok, failed);
    }

    const SimConfig& config() const { return cfg_; }
    const PdrTracker& tracker() const { return tracker_; }
    ChannelMap channel_map() const { return map_; }
    PhyMode phy() const { return phy_; }
    TxPower txp() const { return txp_; }
    std::int64_t events_run() const { return event_; }

private:
    void adapt_now() {
        const PdrPercent pdr_current = pdr_latest_overall();
        const double rssi_current = std::clamp(period_rssi_sum_ / static_cast<double>(period_events_), -120.0, 20.0);
        period_rssi_sum_ = 0.0;
        period_events_ = 0;

        // A map that will be reset gets its blacklisted channels re-probed from scratch;
        // their stale windows would otherwise disable them again immediately.
        if (enabled_count(map_) < cfg_.hop.channel_threshold) {
            for (int c = 0; c < kDataChannels; ++c)
                if (!map_.enabled(ChannelIndex{c})) tracker_.clear_window(ChannelIndex{c});
        }
        ChannelMap next = update_channel_map(tracker_, map_, cfg_.hop);
        if (enabled_count(next) == 0) {
            for (int c = 0; c < kDataChannels; ++c) tracker_.clear_window(ChannelIndex{c});
            next = ChannelMap::all();
        }
        map_ = next;

        const LinkParams link{phy_, txp_, rssi_current, pdr_current};
        std::tie(phy_, txp_) = adapt(link, cfg_.link_thresholds);
    }

    SimConfig cfg_;
    CounterRng rng_;
    PdrTracker tracker_;
    HopState hop_;
    ChannelMap map_ = ChannelMap::all();
    PhyMode phy_;
    TxPower txp_;
    std::int64_t event_ = 0;
    double period_rssi_sum_ = 0.0;
    std::int64_t period_events_ = 0;
};

}  // namespace rke::sim
