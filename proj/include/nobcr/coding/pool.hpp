#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "nobcr/core/neighbor_view.hpp"
#include "nobcr/core/packet.hpp"

namespace nobcr {

/**
 * A buffered native packet and the previous hops it was heard from (H_p).
 *
 * `relay_hops` is the subset that sent p as a regular constituent and so
 * elected forwarders for it; hops that only carried p as gratis are left out.
 * `received_at` is the first reception; `last_touch` moves forward whenever a
 * copy is heard or the node itself transmits the packet, and drives eviction.
 */
struct PoolEntry {
    PacketId pid;
    Payload payload;
    NodeSet prev_hops;
    NodeSet relay_hops;
    std::vector<std::pair<NodeId, SimTime>> hop_times;  // last time each hop was heard
    NodeId first_hop = kNoNode;  // first relay hop, else first hop heard
    SimTime received_at = 0.0;
    SimTime last_touch = 0.0;
    SimTime origin_time = 0.0;

    void add_hop(NodeId hop, SimTime now, bool relayed = true) {
        if (first_hop == kNoNode || (relayed && relay_hops.empty())) first_hop = hop;
        prev_hops.insert(hop);
        if (relayed) relay_hops.insert(hop);
        for (auto& [h, t] : hop_times)
            if (h == hop) {
                t = now;
                return;
            }
        hop_times.emplace_back(hop, now);
    }

    /// Hops heard at or after `since`.
    [[nodiscard]] NodeSet hops_since(SimTime since) const {
        NodeSet out;
        for (const auto& [h, t] : hop_times)
            if (t >= since) out.insert(h);
        return out;
    }
};

/// Packet pool with B_T eviction measured from the latest touch.
class PacketPool {
public:
    explicit PacketPool(SimTime lifetime = 2.0) : lifetime_(lifetime) {}

    [[nodiscard]] SimTime lifetime() const { return lifetime_; }

    [[nodiscard]] PoolEntry* find(const PacketId& pid, SimTime now) {
        auto it = entries_.find(pid);
        if (it == entries_.end() || !alive(it->second, now)) return nullptr;
        return &it->second;
    }
    [[nodiscard]] const PoolEntry* find(const PacketId& pid, SimTime now) const {
        auto it = entries_.find(pid);
        if (it == entries_.end() || !alive(it->second, now)) return nullptr;
        return &it->second;
    }

    [[nodiscard]] bool holds(const PacketId& pid, SimTime now) const { return find(pid, now) != nullptr; }

    /// Creates the entry if needed (storing the payload) and returns it.
    PoolEntry& insert(const PacketId& pid, const Payload& payload, SimTime origin_time, SimTime now) {
        auto it = entries_.find(pid);
        if (it != entries_.end() && !alive(it->second, now)) {
            entries_.erase(it);
            it = entries_.end();
        }
        if (it == entries_.end()) {
            PoolEntry e;
            e.pid = pid;
            e.payload = payload;
            e.received_at = now;
            e.last_touch = now;
            e.origin_time = origin_time;
            it = entries_.emplace(pid, std::move(e)).first;
        }
        return it->second;
    }

    void touch(const PacketId& pid, SimTime now) {
        if (auto* e = find(pid, now)) e->last_touch = now;
    }

    /// Drops expired entries, except those the caller still needs (queued for transmission).
    template <typename KeepFn>
    void evict(SimTime now, KeepFn&& keep) {
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (!alive(it->second, now) && !keep(it->first))
                it = entries_.erase(it);
            else
                ++it;
        }
    }
    void evict(SimTime now) {
        evict(now, [](const PacketId&) { return false; });
    }

    /// Σ|H_p| over live entries: the lightweight detector's storage, in node ids.
    [[nodiscard]] std::size_t stored_items(SimTime now) const {
        std::size_t n = 0;
        for (const auto& [_, e] : entries_)
            if (alive(e, now)) n += e.prev_hops.size();
        return n;
    }

    [[nodiscard]] std::size_t size(SimTime now) const {
        std::size_t n = 0;
        for (const auto& [_, e] : entries_)
            if (alive(e, now)) ++n;
        return n;
    }

    /// Extends lifetime for an entry still sitting in the output queue.
    void pin(const PacketId& pid, SimTime now) {
        auto it = entries_.find(pid);
        if (it != entries_.end() && it->second.last_touch + lifetime_ <= now) it->second.last_touch = now;
    }

private:
    [[nodiscard]] bool alive(const PoolEntry& e, SimTime now) const { return now < e.last_touch + lifetime_; }

    SimTime lifetime_;
    std::unordered_map<PacketId, PoolEntry, PacketIdHash> entries_;
};

/**
 * Records that `prev_hop` was heard transmitting a copy of `pid`. The first
 * copy creates the entry with its payload; later copies only grow H_p.
 */
inline PoolEntry& record_copy(PacketPool& pool, const PacketId& pid, NodeId prev_hop, const Payload& payload,
                              SimTime origin_time, SimTime now, bool relayed = true) {
    PoolEntry& e = pool.insert(pid, payload, origin_time, now);
    if (prev_hop != kNoNode) e.add_hop(prev_hop, now, relayed);
    e.last_touch = now;
    return e;
}

/**
 * Z_p: nodes estimated to hold p, i.e. the union over previous hops i of
 * N(i) together with i itself (a hop that transmitted p holds it). Unknown
 * hops contribute {i}.
 */
inline NodeSet receivers_of(const NodeSet& prev_hops, const NeighborView& view) {
    NodeSet z = prev_hops;
    prev_hops.for_each([&](NodeId i) {
        if (const NodeSet* ni = view.neighbors_of(i)) z |= *ni;
    });
    return z;
}

inline NodeSet receivers_of(const PoolEntry& entry, const NeighborView& view) {
    return receivers_of(entry.prev_hops, view);
}

}  // namespace nobcr
