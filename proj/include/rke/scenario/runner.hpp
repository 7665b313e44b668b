#pragma once

// Scenario orchestration: provisioning and a first authentication round, then the
// data phase on the simulated link with attacks fired at their trigger events.

#include <rke/protocol/session.hpp>
#include <rke/rfsim/link_sim.hpp>
#include <rke/rfsim/rng.hpp>
#include <rke/scenario/attacks.hpp>
#include <rke/scenario/config.hpp>
#include <rke/scenario/metrics.hpp>

#include <algorithm>
#include <future>
#include <random>
#include <vector>

namespace rke::scenario {

inline constexpr std::array<int, 4> kDynamicWifiChannels{1, 5, 10, 13};

inline RunMetrics run_scenario(const ScenarioConfig& cfg) {
    RunMetrics m;
    m.summary.name = cfg.name;
    m.summary.seed = cfg.seed;
    m.summary.adaptation = cfg.adaptation;

    std::mt19937_64 rng(cfg.seed);
    proto::Deployment d = proto::provision(cfg.vin, rng, cfg.defenses);
    m.summary.auth_ok = proto::run_round(d, rng).executed;

    std::vector<AttackDescriptor> attacks = cfg.attacks;
    std::stable_sort(attacks.begin(), attacks.end(),
                     [](const AttackDescriptor& a, const AttackDescriptor& b) { return a.trigger_event < b.trigger_event; });
    auto next_attack = attacks.begin();

    sim::LinkSimulator link(cfg.sim_config());
    m.series.reserve(static_cast<std::size_t>(cfg.duration_events));
    for (std::int64_t e = 0; e < cfg.duration_events; ++e) {
        for (; next_attack != attacks.end() && next_attack->trigger_event == e; ++next_attack)
            m.summary.attacks.push_back(run_attack(next_attack->kind, d, rng, e));

        const sim::EventOutcome out = link.run_connection_event();
        EventRecord r;
        r.event_index = out.event_index;
        r.time_slot = static_cast<double>(out.event_index) / cfg.events_per_second;
        r.channel = out.channel.value();
        r.phy = link.phy();
        r.txp_dbm = link.txp().dbm();
        r.rssi_dbm = out.rssi;
        r.success = out.success;
        r.pdr_latest_overall = link.pdr_latest_overall().fraction();
        r.pdr_total_overall = link.pdr_total_overall().fraction();
        r.enabled_channel_count = enabled_count(link.channel_map());
        r.channel_map = encode_map(link.channel_map());
        m.series.push_back(r);
    }
    summarize_series(m.summary, m.series);
    return m;
}

/// A single interferer (or none) becomes four, hopping ch1 -> ch5 -> ch10 -> ch13 at the
/// quarter marks with the original power and duty cycle. An explicit schedule is kept.
inline ScenarioConfig with_dynamic_schedule(ScenarioConfig cfg) {
    if (cfg.interferers.size() > 1) return cfg;
    const sim::Interferer base = cfg.interferers.empty() ? sim::Interferer{} : cfg.interferers.front();
    cfg.interferers.clear();
    for (std::size_t q = 0; q < kDynamicWifiChannels.size(); ++q) {
        sim::Interferer i = base;
        i.wifi_channel = kDynamicWifiChannels[q];
        i.start_event = cfg.duration_events * static_cast<std::int64_t>(q) / 4;
        i.end_event = cfg.duration_events * static_cast<std::int64_t>(q + 1) / 4;
        cfg.interferers.push_back(i);
    }
    return cfg;
}

/// Runs the scenario under a switching Wi-Fi schedule and reports one phase per interferer.
inline RunMetrics run_dynamic_wifi(const ScenarioConfig& cfg) {
    const ScenarioConfig dyn = with_dynamic_schedule(cfg);
    RunMetrics m = run_scenario(dyn);
    for (const sim::Interferer& i : dyn.interferers) {
        const std::int64_t end = std::min(i.end_event, dyn.duration_events);
        PhaseSummary p = summarize_phase(m.series, i.start_event, end);
        p.wifi_channel = i.wifi_channel;
        m.summary.phases.push_back(p);
    }
    return m;
}

/// Every configured attack kind (all four when none are configured), each against its
/// own freshly provisioned deployment.
inline std::vector<AttackReport> run_attack_suite(const ScenarioConfig& cfg) {
    std::vector<AttackDescriptor> attacks = cfg.attacks;
    if (attacks.empty())
        for (AttackKind k : kAllAttacks) attacks.push_back({k, 0});

    std::vector<AttackReport> out;
    for (std::size_t i = 0; i < attacks.size(); ++i) {
        std::mt19937_64 rng(sim::splitmix64(cfg.seed ^ sim::splitmix64(i)));
        proto::Deployment d = proto::provision(cfg.vin, rng, cfg.defenses);
        if (!proto::run_round(d, rng).executed) throw InvalidState("attack suite: provisioning round failed");
        out.push_back(run_attack(attacks[i].kind, d, rng, attacks[i].trigger_event));
    }
    return out;
}

struct Comparison {
    RunMetrics adaptive;
    RunMetrics baseline;
};

/// Adaptive and baseline twins from the same seed, so both see the same interference
/// and the same per-event random draws. The twins share nothing and run concurrently.
inline Comparison compare(const ScenarioConfig& cfg, bool dynamic = false) {
    ScenarioConfig adaptive = cfg;
    adaptive.adaptation = true;
    const ScenarioConfig baseline = cfg.as_baseline();
    auto run = [dynamic](const ScenarioConfig& c) { return dynamic ? run_dynamic_wifi(c) : run_scenario(c); };

    auto base_future = std::async(std::launch::async, run, baseline);
    Comparison out;
    out.adaptive = run(adaptive);
    out.baseline = base_future.get();
    return out;
}

}  // namespace rke::scenario
