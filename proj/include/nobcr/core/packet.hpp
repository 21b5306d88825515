#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nobcr/core/node_set.hpp"

namespace nobcr {

/// Simulation time in seconds.
using SimTime = double;

/// Network-wide identity of a native packet. Sequence numbers start at 1.
struct PacketId {
    NodeId source = kNoNode;
    std::uint64_t sn = 0;

    friend auto operator<=>(const PacketId&, const PacketId&) = default;

    [[nodiscard]] std::string to_string() const {
        return std::to_string(source) + ":" + std::to_string(sn);
    }
};

struct PacketIdHash {
    std::size_t operator()(const PacketId& p) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t{p.source} << 40) ^ p.sn);
    }
};

using Payload = std::vector<std::uint8_t>;

/// Deterministic content for a native packet, so decoders can be checked bit-exactly.
inline Payload make_payload(const PacketId& pid, std::size_t size) {
    Payload out(size);
    std::uint64_t x = (std::uint64_t{pid.source} << 32) ^ pid.sn ^ 0x9e3779b97f4a7c15ULL;
    for (std::size_t i = 0; i < size; ++i) {
        // splitmix64 step
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        out[i] = static_cast<std::uint8_t>(z ^ (z >> 31));
    }
    return out;
}

/// Per-constituent header carried by every data packet.
struct ConstituentHeader {
    PacketId pid;
    NodeSet forwarders;  // always empty when gratis
    bool gratis = false;
    SimTime origin_time = 0.0;
};

enum class PacketKind : std::uint8_t { Native, Encoded };

struct Packet {
    PacketKind kind = PacketKind::Native;
    std::vector<ConstituentHeader> constituents;
    Payload payload;  // XOR of constituent payloads when Encoded
    NodeId tx_node = kNoNode;

    [[nodiscard]] bool has_gratis() const {
        for (const auto& c : constituents)
            if (c.gratis) return true;
        return false;
    }

    /// Approximate on-air size: payload plus per-constituent header fields.
    [[nodiscard]] std::size_t wire_bytes() const {
        std::size_t bytes = payload.size() + 8;
        for (const auto& c : constituents) bytes += 16 + 4 * c.forwarders.size();
        return bytes;
    }
};

}  // namespace nobcr
