#pragma once

// Scenario configuration: a JSON document, validated field by field. Errors carry the
// dotted path of the offending field; unknown fields are rejected so typos surface.

#include <rke/chanqual.hpp>
#include <rke/hopctl.hpp>
#include <rke/linkctl.hpp>
#include <rke/protocol/session.hpp>
#include <rke/rfsim/link_sim.hpp>
#include <rke/rfsim/radio.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rke::scenario {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class AttackKind { ImpersonateInject, ImpersonateRevoked, ImpersonateStaleKey, ReplayControl };

inline constexpr std::array<AttackKind, 4> kAllAttacks{AttackKind::ImpersonateInject, AttackKind::ImpersonateRevoked,
                                                       AttackKind::ImpersonateStaleKey, AttackKind::ReplayControl};

constexpr std::string_view to_string(AttackKind k) {
    switch (k) {
        case AttackKind::ImpersonateInject: return "IMPERSONATE_INJECT";
        case AttackKind::ImpersonateRevoked: return "IMPERSONATE_REVOKED";
        case AttackKind::ImpersonateStaleKey: return "IMPERSONATE_STALE_KEY";
        case AttackKind::ReplayControl: return "REPLAY_CONTROL";
    }
    return "?";
}

inline std::optional<AttackKind> parse_attack(std::string_view name) {
    for (AttackKind k : kAllAttacks)
        if (to_string(k) == name) return k;
    return std::nullopt;
}

struct AttackDescriptor {
    AttackKind kind = AttackKind::ImpersonateInject;
    std::int64_t trigger_event = 0;
};

struct LinkSetting {
    PhyMode phy = PhyMode::PhyCoded;
    TxPower txp{8};
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    std::int64_t duration_events = 10'000;
    bool adaptation = true;
    int window_size = PdrTracker::kDefaultWindow;
    PdrPercent pdr_threshold{95.0};
    int channel_threshold = 10;
    int adaptation_period = 25;
    int hop_increment = HopState::kDefaultIncrement;
    double events_per_second = 50.0;
    LinkSetting link{};
    std::optional<LinkSetting> baseline_link;
    LinkThresholds link_thresholds{};
    sim::PathLossParams path_loss{};
    sim::PhyCurve curve{};
    double capture_db = 8.0;
    std::vector<sim::Interferer> interferers;
    std::vector<AttackDescriptor> attacks;
    proto::Defenses defenses{};
    std::string vin = "WVWZZZ1JZXW000001";

    /// The link-simulator view of this scenario.
    sim::SimConfig sim_config(std::uint64_t node_id = 0) const {
        sim::SimConfig s;
        s.seed = seed;
        s.node_id = node_id;
        s.adaptation = adaptation;
        s.window_size = window_size;
        s.hop = HopThresholds{pdr_threshold, channel_threshold};
        s.adaptation_period = adaptation_period;
        s.hop_increment = hop_increment;
        s.phy = link.phy;
        s.txp = link.txp;
        s.link_thresholds = link_thresholds;
        s.path_loss = path_loss;
        s.curve = curve;
        s.capture_db = capture_db;
        s.interferers = interferers;
        return s;
    }

    /// Same scenario with adaptation off, on the baseline link when one is configured.
    ScenarioConfig as_baseline() const {
        ScenarioConfig b = *this;
        b.adaptation = false;
        if (baseline_link) b.link = *baseline_link;
        return b;
    }
};

namespace detail {

class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    std::string at(std::string_view key) const { return path_.empty() ? std::string{key} : path_ + "." + std::string{key}; }

    const json* get(std::string_view key) {
        seen_.insert(std::string{key});
        auto it = j_.find(std::string{key});
        if (it == j_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    template <typename T>
    void read(std::string_view key, T& out) {
        if (const json* v = get(key)) out = convert<T>(*v, at(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.contains(it.key())) throw ConfigError(at(it.key()), "unknown field");
    }

    template <typename T>
    static T convert(const json& v, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
            return v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned()) return v.get<T>();
                if (v.get<std::int64_t>() < 0) throw ConfigError(path, "must be non-negative");
                return static_cast<T>(v.get<std::int64_t>());
            } else {
                const auto raw = v.get<std::int64_t>();
                if (raw < std::numeric_limits<T>::min() || raw > std::numeric_limits<T>::max())
                    throw ConfigError(path, "integer out of range");
                return static_cast<T>(raw);
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(path, "expected a number");
            return v.get<T>();
        } else {
            if (!v.is_string()) throw ConfigError(path, "expected a string");
            return v.get<std::string>();
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

/// Runs `check` and re-raises an InvalidArgument against `path`.
template <typename F>
auto at_path(const std::string& path, F&& check) {
    try {
        return check();
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
    }
}

inline LinkSetting parse_link(const json& j, const std::string& path) {
    Fields f(j, path);
    LinkSetting out;
    std::string phy{to_string(out.phy)};
    int txp = out.txp.dbm();
    f.read("phy", phy);
    f.read("txp_dbm", txp);
    f.finish();
    const auto mode = parse_phy(phy);
    if (!mode) throw ConfigError(f.at("phy"), "expected one of PHY_1M, PHY_2M, PHY_CODED");
    out.phy = *mode;
    out.txp = at_path(f.at("txp_dbm"), [&] { return TxPower{txp}; });
    return out;
}

inline double read_percent(Fields& f, std::string_view key, double fallback) {
    double v = fallback;
    f.read(key, v);
    return at_path(f.at(key), [&] { return PdrPercent{v}; }).value();
}

}  // namespace detail

/// Parses and validates a scenario document. Absent fields keep their defaults.
inline ScenarioConfig parse_scenario(const json& doc) {
    using detail::at_path;
    ScenarioConfig cfg;
    detail::Fields f(doc, "");

    f.read("name", cfg.name);
    f.read("seed", cfg.seed);
    f.read("duration_events", cfg.duration_events);
    f.read("adaptation", cfg.adaptation);
    f.read("window_size", cfg.window_size);
    cfg.pdr_threshold = PdrPercent{detail::read_percent(f, "pdr_threshold", cfg.pdr_threshold.value())};
    f.read("channel_threshold", cfg.channel_threshold);
    f.read("adaptation_period", cfg.adaptation_period);
    f.read("hop_increment", cfg.hop_increment);
    f.read("events_per_second", cfg.events_per_second);
    f.read("capture_db", cfg.capture_db);
    f.read("vin", cfg.vin);

    if (const json* v = f.get("link")) cfg.link = detail::parse_link(*v, "link");
    if (const json* v = f.get("baseline_link")) cfg.baseline_link = detail::parse_link(*v, "baseline_link");

    if (const json* v = f.get("link_thresholds")) {
        detail::Fields t(*v, "link_thresholds");
        t.read("rssi_high", cfg.link_thresholds.rssi_high);
        t.read("rssi_low", cfg.link_thresholds.rssi_low);
        cfg.link_thresholds.pdr_high = PdrPercent{detail::read_percent(t, "pdr_high", cfg.link_thresholds.pdr_high.value())};
        cfg.link_thresholds.pdr_low = PdrPercent{detail::read_percent(t, "pdr_low", cfg.link_thresholds.pdr_low.value())};
        t.finish();
        at_path("link_thresholds", [&] { cfg.link_thresholds.validate(); });
    }

    if (const json* v = f.get("path_loss")) {
        detail::Fields p(*v, "path_loss");
        p.read("pl0_db", cfg.path_loss.pl0_db);
        p.read("exponent", cfg.path_loss.exponent);
        p.read("distance_m", cfg.path_loss.distance_m);
        p.finish();
        at_path("path_loss", [&] { cfg.path_loss.validate(); });
    }

    if (const json* v = f.get("curve")) {
        detail::Fields c(*v, "curve");
        c.read("floor_2m_dbm", cfg.curve.floor_2m_dbm);
        c.read("floor_1m_dbm", cfg.curve.floor_1m_dbm);
        c.read("floor_coded_dbm", cfg.curve.floor_coded_dbm);
        c.read("saturation_dbm", cfg.curve.saturation_dbm);
        c.read("p_max", cfg.curve.p_max);
        c.finish();
        at_path("curve", [&] { cfg.curve.validate(); });
    }

    if (const json* v = f.get("interferers")) {
        if (!v->is_array()) throw ConfigError("interferers", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string path = "interferers[" + std::to_string(i) + "]";
            detail::Fields w((*v)[i], path);
            sim::Interferer it;
            w.read("wifi_channel", it.wifi_channel);
            w.read("rssi_dbm", it.rssi_dbm);
            w.read("duty_cycle", it.duty_cycle);
            w.read("start_event", it.start_event);
            w.read("end_event", it.end_event);
            w.finish();
            at_path(path, [&] { it.validate(); });
            cfg.interferers.push_back(it);
        }
    }

    if (const json* v = f.get("attacks")) {
        if (!v->is_array()) throw ConfigError("attacks", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string path = "attacks[" + std::to_string(i) + "]";
            detail::Fields a((*v)[i], path);
            std::string kind;
            AttackDescriptor d;
            a.read("kind", kind);
            a.read("trigger_event", d.trigger_event);
            a.finish();
            const auto k = parse_attack(kind);
            if (!k) throw ConfigError(a.at("kind"), "unknown attack kind '" + kind + "'");
            d.kind = *k;
            if (d.trigger_event < 0) throw ConfigError(a.at("trigger_event"), "must be non-negative");
            cfg.attacks.push_back(d);
        }
    }

    if (const json* v = f.get("defenses")) {
        detail::Fields d(*v, "defenses");
        d.read("whitelist", cfg.defenses.whitelist);
        d.read("revocation", cfg.defenses.revocation);
        d.read("key_rotation", cfg.defenses.key_rotation);
        d.read("fresh_nonces", cfg.defenses.fresh_nonces);
        d.finish();
    }
    f.finish();

    if (cfg.window_size < 1) throw ConfigError("window_size", "must be >= 1");
    if (cfg.adaptation_period < 1) throw ConfigError("adaptation_period", "must be >= 1");
    if (cfg.duration_events < cfg.adaptation_period)
        throw ConfigError("duration_events", "must be >= adaptation_period");
    if (!(cfg.events_per_second > 0.0)) throw ConfigError("events_per_second", "must be > 0");
    at_path("channel_threshold", [&] { HopThresholds{cfg.pdr_threshold, cfg.channel_threshold}.validate(); });
    at_path("hop_increment", [&] { HopState{cfg.hop_increment}; });
    at_path("vin", [&] { auth::derive_pseudo_id(Block{}, cfg.vin, Block{}); });
    for (std::size_t i = 0; i < cfg.attacks.size(); ++i)
        if (cfg.attacks[i].trigger_event >= cfg.duration_events)
            throw ConfigError("attacks[" + std::to_string(i) + "].trigger_event", "must be < duration_events");
    return cfg;
}

inline ScenarioConfig parse_scenario_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string{"parse error: "} + e.what());
    }
    return parse_scenario(doc);
}

inline ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

}  // namespace rke::scenario
