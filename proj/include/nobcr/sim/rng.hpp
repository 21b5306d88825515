#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nobcr {

/// Uniform draw in [0,1) from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Integer in [0, n).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

/// splitmix64 finalizer, used to derive independent seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : stream) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    return mix64(mix64(seed) ^ h ^ mix64(index + 1));
}

/// Named substreams of one run, so that one subsystem's draws never shift another's.
struct RngStreams {
    explicit RngStreams(std::uint64_t seed)
        : traffic(derive_seed(seed, "traffic")),
          rad(derive_seed(seed, "rad")),
          jitter(derive_seed(seed, "jitter")),
          mac(derive_seed(seed, "mac")),
          seed_(seed) {}

    /// Mobility gets one stream per node so trajectories do not depend on query order.
    [[nodiscard]] std::mt19937_64 mobility(std::uint32_t node) const {
        return std::mt19937_64(derive_seed(seed_, "mobility", node));
    }

    std::mt19937_64 traffic;
    std::mt19937_64 rad;
    std::mt19937_64 jitter;
    std::mt19937_64 mac;

private:
    std::uint64_t seed_;
};

}  // namespace nobcr
