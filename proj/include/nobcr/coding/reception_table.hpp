#pragma once

#include <unordered_map>

#include "nobcr/core/neighbor_view.hpp"
#include "nobcr/core/packet.hpp"

namespace nobcr {

/**
 * Neighbor reception table: for each packet, the neighbors believed to hold
 * it. Populated only from overheard transmissions: when i is heard sending p,
 * i and every common neighbor of i are recorded, using the neighborhood known
 * at that moment. Records expire R_T after their last update.
 */
class ReceptionTable {
public:
    explicit ReceptionTable(SimTime lifetime = 5.0) : lifetime_(lifetime) {}

    void record_transmission(const PacketId& p, NodeId transmitter, const NeighborView& view, SimTime now) {
        NodeSet holders;
        holders.insert(transmitter);
        if (const NodeSet* ni = view.neighbors_of(transmitter)) holders |= *ni;
        add(p, holders & view.one_hop(), now);
    }

    /// Own transmission: every current neighbor heard it.
    void record_own(const PacketId& p, const NeighborView& view, SimTime now) { add(p, view.one_hop(), now); }

    /// R^v_u ∋ p ?
    [[nodiscard]] bool holds(NodeId neighbor, const PacketId& p, SimTime now) const {
        auto it = rows_.find(p);
        return it != rows_.end() && now < it->second.expires && it->second.holders.contains(neighbor);
    }

    [[nodiscard]] NodeSet holders(const PacketId& p, SimTime now) const {
        auto it = rows_.find(p);
        if (it == rows_.end() || now >= it->second.expires) return {};
        return it->second.holders;
    }

    void evict(SimTime now) {
        std::erase_if(rows_, [now](const auto& kv) { return now >= kv.second.expires; });
    }

    /// Σ|R^v_u| over live rows, in node ids.
    [[nodiscard]] std::size_t stored_items(SimTime now) const {
        std::size_t n = 0;
        for (const auto& [_, row] : rows_)
            if (now < row.expires) n += row.holders.size();
        return n;
    }

private:
    struct Row {
        NodeSet holders;
        SimTime expires = 0.0;
    };

    void add(const PacketId& p, const NodeSet& who, SimTime now) {
        auto& row = rows_[p];
        if (now >= row.expires) row.holders.clear();
        row.holders |= who;
        row.expires = now + lifetime_;
    }

    SimTime lifetime_;
    std::unordered_map<PacketId, Row, PacketIdHash> rows_;
};

}  // namespace nobcr
