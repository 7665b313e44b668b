#pragma once

// CSV and JSON output for scenario runs.

#include <rke/scenario/metrics.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rke::scenario {

inline constexpr const char* kCsvHeader =
    "event_index,time_slot,channel,phy,txp_dbm,rssi_dbm,success,pdr_latest_overall,pdr_total_overall,"
    "enabled_channel_count,channel_map_hex";

inline std::string csv_row(const EventRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%lld,%.3f,%d,%s,%d,%.2f,%d,%.6f,%.6f,%d,%s", static_cast<long long>(r.event_index),
                  r.time_slot, r.channel, std::string{to_string(r.phy)}.c_str(), r.txp_dbm, r.rssi_dbm,
                  r.success ? 1 : 0, r.pdr_latest_overall, r.pdr_total_overall, r.enabled_channel_count,
                  to_hex(r.channel_map).c_str());
    return buf;
}

inline void write_csv(std::ostream& out, const RunMetrics& m) {
    out << kCsvHeader << '\n';
    for (const EventRecord& r : m.series) out << csv_row(r) << '\n';

    const RunSummary& s = m.summary;
    char buf[256];
    std::snprintf(buf, sizeof buf, "# summary name=%s seed=%llu adaptation=%d events=%lld auth_ok=%d", s.name.c_str(),
                  static_cast<unsigned long long>(s.seed), s.adaptation ? 1 : 0, static_cast<long long>(s.events),
                  s.auth_ok ? 1 : 0);
    out << buf << '\n';
    std::snprintf(buf, sizeof buf, "# pdr_total=%.6f steady_state_pdr_latest=%.6f final_phy=%s final_txp_dbm=%d",
                  s.pdr_total, s.steady_state_pdr_latest, std::string{to_string(s.final_phy)}.c_str(),
                  s.final_txp_dbm);
    out << buf << '\n';
    for (const PhaseSummary& p : s.phases) {
        std::snprintf(buf, sizeof buf, "# phase start=%lld end=%lld wifi_channel=%d pdr=%.6f pdr_total_at_end=%.6f",
                      static_cast<long long>(p.start_event), static_cast<long long>(p.end_event),
                      p.wifi_channel.value_or(0), p.pdr, p.pdr_total_at_end);
        out << buf << '\n';
    }
    for (const AttackReport& a : s.attacks) {
        out << "# attack kind=" << to_string(a.kind) << " trigger_event=" << a.trigger_event
            << " verdict=" << to_string(a.verdict) << " failure_point=" << to_string(a.observed)
            << " expected=" << to_string(a.expected_verdict()) << '\n';
    }
}

inline void emit_csv(const RunMetrics& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, m);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline nlohmann::json to_json(const AttackReport& a, bool with_transcript = false) {
    nlohmann::json j{
        {"kind", to_string(a.kind)},
        {"trigger_event", a.trigger_event},
        {"defense_enabled", a.defense_on},
        {"connected", a.connected},
        {"executed", a.executed},
        {"failure_point", to_string(a.observed)},
        {"expected_failure_point", to_string(a.expected_point())},
        {"verdict", to_string(a.verdict)},
        {"expected_verdict", to_string(a.expected_verdict())},
    };
    if (with_transcript) {
        nlohmann::json lines = nlohmann::json::array();
        for (const proto::TraceEntry& t : a.transcript) lines.push_back(t.line());
        j["transcript"] = lines;
    }
    return j;
}

inline nlohmann::json to_json(const RunSummary& s) {
    nlohmann::json phases = nlohmann::json::array();
    for (const PhaseSummary& p : s.phases) {
        phases.push_back({{"start_event", p.start_event},
                          {"end_event", p.end_event},
                          {"wifi_channel", p.wifi_channel ? nlohmann::json(*p.wifi_channel) : nlohmann::json()},
                          {"pdr", p.pdr},
                          {"mean_pdr_latest", p.mean_pdr_latest},
                          {"pdr_total_at_end", p.pdr_total_at_end}});
    }
    nlohmann::json attacks = nlohmann::json::array();
    for (const AttackReport& a : s.attacks) attacks.push_back(to_json(a));
    return {
        {"name", s.name},
        {"seed", s.seed},
        {"adaptation", s.adaptation},
        {"events", s.events},
        {"pdr_total", s.pdr_total},
        {"steady_state_pdr_latest", s.steady_state_pdr_latest},
        {"auth_ok", s.auth_ok},
        {"final_phy", to_string(s.final_phy)},
        {"final_txp_dbm", s.final_txp_dbm},
        {"final_enabled_channels", s.final_enabled_channels},
        {"phases", phases},
        {"attacks", attacks},
        {"attacks_as_expected", s.attacks_as_expected()},
    };
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace rke::scenario
