// rke_sim: run link-adaptation scenarios, attack suites and adaptive/baseline comparisons.
//
// Exit codes: 0 ok, 1 an attack verdict differed from its expectation,
// 2 bad arguments or configuration, 3 output could not be written.

#include <rke/rke.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace rke::scenario;

constexpr int kExitOk = 0;
constexpr int kExitAttackMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool no_adapt = false;
};

bool wants_json(const std::string& path) { return std::filesystem::path(path).extension() == ".json"; }

ScenarioConfig load(const Options& o) {
    ScenarioConfig cfg = o.config.empty() ? ScenarioConfig{} : load_scenario(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.no_adapt) cfg = cfg.as_baseline();
    return cfg;
}

void print_summary(const RunSummary& s) {
    std::printf("%-10s adaptation=%s events=%lld pdr_total=%.4f steady_state_pdr_latest=%.4f final=%s/%+d dBm "
                "channels=%d auth_ok=%s\n",
                s.name.c_str(), s.adaptation ? "on" : "off", static_cast<long long>(s.events), s.pdr_total,
                s.steady_state_pdr_latest, std::string{rke::to_string(s.final_phy)}.c_str(), s.final_txp_dbm,
                s.final_enabled_channels, s.auth_ok ? "yes" : "no");
    for (const PhaseSummary& p : s.phases)
        std::printf("  phase wifi ch%-2d events [%lld, %lld) pdr=%.4f pdr_total_at_end=%.4f\n", p.wifi_channel.value_or(0),
                    static_cast<long long>(p.start_event), static_cast<long long>(p.end_event), p.pdr,
                    p.pdr_total_at_end);
}

void print_attack(const AttackReport& a) {
    std::printf("  %-22s defense=%-3s verdict=%-9s failure_point=%-16s expected=%s%s\n",
                std::string{to_string(a.kind)}.c_str(), a.defense_on ? "on" : "off",
                std::string{to_string(a.verdict)}.c_str(), std::string{to_string(a.observed)}.c_str(),
                std::string{to_string(a.expected_verdict())}.c_str(), a.as_expected() ? "" : "  MISMATCH");
}

int write_run(const RunMetrics& m, const std::string& out) {
    if (!out.empty()) {
        if (wants_json(out))
            write_text(out, to_json(m.summary).dump(2) + "\n");
        else
            emit_csv(m, out);
    }
    print_summary(m.summary);
    for (const AttackReport& a : m.summary.attacks) print_attack(a);
    return m.summary.attacks_as_expected() ? kExitOk : kExitAttackMismatch;
}

int cmd_run(const Options& o) { return write_run(run_scenario(load(o)), o.out); }

int cmd_dynamic(const Options& o) { return write_run(run_dynamic_wifi(load(o)), o.out); }

int cmd_attacks(const Options& o) {
    const ScenarioConfig cfg = load(o);
    const std::vector<AttackReport> reports = run_attack_suite(cfg);
    bool all_ok = true;
    for (const AttackReport& a : reports) {
        print_attack(a);
        all_ok = all_ok && a.as_expected();
    }
    if (!o.out.empty()) {
        if (wants_json(o.out)) {
            nlohmann::json j = nlohmann::json::array();
            for (const AttackReport& a : reports) j.push_back(to_json(a, true));
            write_text(o.out, j.dump(2) + "\n");
        } else {
            std::string text = "round,sender,kind,payload_hex\n";
            for (const AttackReport& a : reports) {
                text += "# " + std::string{to_string(a.kind)} + " verdict=" + std::string{to_string(a.verdict)} + "\n";
                for (const auto& t : a.transcript) text += t.line() + "\n";
            }
            write_text(o.out, text);
        }
    }
    return all_ok ? kExitOk : kExitAttackMismatch;
}

int cmd_compare(const Options& o) {
    const ScenarioConfig cfg = load(o);
    const Comparison c = compare(cfg, cfg.interferers.size() > 1);
    if (!o.out.empty()) {
        if (wants_json(o.out)) {
            const nlohmann::json j{{"adaptive", to_json(c.adaptive.summary)}, {"baseline", to_json(c.baseline.summary)}};
            write_text(o.out, j.dump(2) + "\n");
        } else {
            const std::filesystem::path p(o.out);
            const std::filesystem::path stem = p.parent_path() / p.stem();
            const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
            emit_csv(c.adaptive, stem.string() + "_adaptive" + ext);
            emit_csv(c.baseline, stem.string() + "_baseline" + ext);
        }
    }
    print_summary(c.adaptive.summary);
    print_summary(c.baseline.summary);
    const bool ok = c.adaptive.summary.attacks_as_expected() && c.baseline.summary.attacks_as_expected();
    return ok ? kExitOk : kExitAttackMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive BLE link and keyless-entry authentication scenarios"};
    app.require_subcommand(1);

    Options opts;
    auto add_common = [&](CLI::App* sub, bool adapt_flag) {
        sub->add_option("--config", opts.config, "Scenario file (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "Override the scenario seed");
        sub->add_option("--out", opts.out, "Output path; a .json extension writes the summary as JSON");
        if (adapt_flag) sub->add_flag("--no-adapt", opts.no_adapt, "Fixed link (baseline_link if configured)");
    };

    CLI::App* run = app.add_subcommand("run", "Single scenario run");
    CLI::App* dynamic = app.add_subcommand("dynamic", "Wi-Fi channel switching at the quarter marks");
    CLI::App* attacks = app.add_subcommand("attacks", "Attack suite on fresh deployments");
    CLI::App* cmp = app.add_subcommand("compare", "Adaptive and baseline twins from one seed");
    add_common(run, true);
    add_common(dynamic, true);
    add_common(attacks, false);
    add_common(cmp, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(opts);
        if (dynamic->parsed()) return cmd_dynamic(opts);
        if (attacks->parsed()) return cmd_attacks(opts);
        if (cmp->parsed()) return cmd_compare(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const rke::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitConfig;
}
