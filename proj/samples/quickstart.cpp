// Provision a fob, authenticate once, then run a short adaptive link next to a Wi-Fi AP.

#include <rke/rke.hpp>

#include <cstdio>
#include <random>

int main() {
    std::mt19937_64 rng(42);
    rke::proto::Deployment d = rke::proto::provision("WVWZZZ1JZXW000001", rng);
    const rke::proto::RoundResult r = rke::proto::run_round(d, rng);
    std::printf("auth round: executed=%d command=%s\n", r.executed ? 1 : 0,
                r.command ? std::string{rke::proto::to_string(*r.command)}.c_str() : "-");

    rke::sim::SimConfig cfg;
    cfg.seed = 42;
    cfg.path_loss.distance_m = 2.5;
    cfg.interferers.push_back(rke::sim::Interferer{.wifi_channel = 6});
    rke::sim::LinkSimulator link(cfg);
    for (int i = 0; i < 2000; ++i) link.run_connection_event();

    const rke::PackedChannelMap map = rke::encode_map(link.channel_map());
    std::printf("after %lld events: pdr_total=%.4f pdr_latest=%.4f phy=%s txp=%d dBm map=%s\n",
                static_cast<long long>(link.events_run()), link.pdr_total_overall().fraction(),
                link.pdr_latest_overall().fraction(), std::string{rke::to_string(link.phy())}.c_str(),
                link.txp().dbm(), rke::to_hex(map).c_str());
    return 0;
}
