#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "nobcr/coding/pool.hpp"
#include "nobcr/core/packet.hpp"

namespace nobcr {

inline void xor_into(Payload& acc, const Payload& other) {
    if (acc.size() != other.size()) throw std::invalid_argument("payload length mismatch");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] ^= other[i];
}

/// One constituent of a planned transmission.
struct EncodeItem {
    const PoolEntry* entry = nullptr;
    NodeSet forwarders;
    bool gratis = false;
};

/// Single item: the native packet. Several: XOR of payloads with one header per constituent.
inline Packet encode(const std::vector<EncodeItem>& plan, NodeId tx_node) {
    if (plan.empty()) throw std::invalid_argument("empty encoding plan");
    Packet pkt;
    pkt.kind = plan.size() == 1 ? PacketKind::Native : PacketKind::Encoded;
    pkt.tx_node = tx_node;
    pkt.payload = plan.front().entry->payload;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto& item = plan[i];
        if (i > 0) xor_into(pkt.payload, item.entry->payload);
        ConstituentHeader h;
        h.pid = item.entry->pid;
        h.gratis = item.gratis;
        if (!item.gratis) h.forwarders = item.forwarders;
        h.origin_time = item.entry->origin_time;
        pkt.constituents.push_back(std::move(h));
    }
    return pkt;
}

struct DecodeResult {
    bool failure = false;
    /// Constituent recovered by this reception, if the pool lacked exactly one.
    std::optional<std::size_t> recovered_index;
    Payload recovered_payload;
    /// Constituents the pool already held before decoding.
    std::vector<std::size_t> known;
};

/**
 * Decodes an encoded packet against the pool. Succeeds when at most one
 * constituent is missing; otherwise every constituent is lost for this node.
 */
inline DecodeResult decode(const Packet& pkt, const PacketPool& pool, SimTime now) {
    DecodeResult r;
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < pkt.constituents.size(); ++i) {
        if (pool.holds(pkt.constituents[i].pid, now))
            r.known.push_back(i);
        else
            missing.push_back(i);
    }
    if (missing.size() > 1) {
        r.failure = true;
        return r;
    }
    if (missing.size() == 1) {
        Payload acc = pkt.payload;
        for (std::size_t i : r.known) xor_into(acc, pool.find(pkt.constituents[i].pid, now)->payload);
        r.recovered_index = missing.front();
        r.recovered_payload = std::move(acc);
    }
    return r;
}

}  // namespace nobcr
