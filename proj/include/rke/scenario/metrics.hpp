#pragma once

#include <rke/hopctl.hpp>
#include <rke/linkctl.hpp>
#include <rke/scenario/attacks.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rke::scenario {

/// One row of the per-event series. Link and map columns describe the state after the
/// event, i.e. after any adaptation step that the event completed.
struct EventRecord {
    std::int64_t event_index = 0;
    double time_slot = 0.0;
    int channel = 0;
    PhyMode phy = PhyMode::PhyCoded;
    int txp_dbm = 0;
    double rssi_dbm = 0.0;
    bool success = false;
    double pdr_latest_overall = 1.0;  // fraction
    double pdr_total_overall = 1.0;   // fraction
    int enabled_channel_count = kDataChannels;
    PackedChannelMap channel_map{};
};

struct PhaseSummary {
    std::int64_t start_event = 0;
    std::int64_t end_event = 0;  // exclusive
    std::optional<int> wifi_channel;
    double pdr = 0.0;               // deliveries within the phase
    double mean_pdr_latest = 0.0;
    double pdr_total_at_end = 0.0;  // lifetime value on the phase's last event
};

struct RunSummary {
    std::string name;
    std::uint64_t seed = 0;
    bool adaptation = true;
    std::int64_t events = 0;
    double pdr_total = 1.0;
    double steady_state_pdr_latest = 1.0;
    bool auth_ok = false;
    PhyMode final_phy = PhyMode::PhyCoded;
    int final_txp_dbm = 0;
    int final_enabled_channels = kDataChannels;
    std::vector<PhaseSummary> phases;
    std::vector<AttackReport> attacks;

    bool attacks_as_expected() const {
        for (const AttackReport& a : attacks)
            if (!a.as_expected()) return false;
        return true;
    }
};

struct RunMetrics {
    std::vector<EventRecord> series;
    RunSummary summary;
};

/// Mean windowed PDR over the final 20% of events.
inline double steady_state_pdr_latest(const std::vector<EventRecord>& series) {
    if (series.empty()) return 1.0;
    const std::size_t from = series.size() - series.size() / 5;
    const std::size_t start = from == series.size() ? series.size() - 1 : from;
    double sum = 0.0;
    for (std::size_t i = start; i < series.size(); ++i) sum += series[i].pdr_latest_overall;
    return sum / static_cast<double>(series.size() - start);
}

inline PhaseSummary summarize_phase(const std::vector<EventRecord>& series, std::int64_t start, std::int64_t end) {
    PhaseSummary p;
    p.start_event = start;
    p.end_event = end;
    std::int64_t ok = 0, n = 0;
    double latest = 0.0;
    for (const EventRecord& r : series) {
        if (r.event_index < start || r.event_index >= end) continue;
        ok += r.success ? 1 : 0;
        latest += r.pdr_latest_overall;
        p.pdr_total_at_end = r.pdr_total_overall;
        ++n;
    }
    p.pdr = n ? static_cast<double>(ok) / static_cast<double>(n) : 1.0;
    p.mean_pdr_latest = n ? latest / static_cast<double>(n) : 1.0;
    return p;
}

/// Fills the series-derived summary fields.
inline void summarize_series(RunSummary& s, const std::vector<EventRecord>& series) {
    s.events = static_cast<std::int64_t>(series.size());
    s.pdr_total = series.empty() ? 1.0 : series.back().pdr_total_overall;
    s.steady_state_pdr_latest = steady_state_pdr_latest(series);
    if (!series.empty()) {
        s.final_phy = series.back().phy;
        s.final_txp_dbm = series.back().txp_dbm;
        s.final_enabled_channels = series.back().enabled_channel_count;
    }
}

}  // namespace rke::scenario
