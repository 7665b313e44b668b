#pragma once

#include <cstdint>

namespace rke::sim {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: every draw is a pure function of (seed, node, event, lane),
/// so a trace can be regenerated from any point and parallel runs never share state.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t node) : seed_(seed), node_(node) {}

    constexpr std::uint64_t bits(std::uint64_t event, std::uint64_t lane = 0) const {
        return splitmix64(seed_ ^ splitmix64(node_ ^ splitmix64(event ^ splitmix64(lane))));
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    constexpr double uniform(std::uint64_t event, std::uint64_t lane = 0) const {
        return static_cast<double>(bits(event, lane) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_;
    std::uint64_t node_;
};

}  // namespace rke::sim
