#pragma once

#include <vector>

#include "nobcr/core/node_set.hpp"
#include "nobcr/core/packet.hpp"

namespace nobcr {

/**
 * A node's knowledge of its 1-hop and 2-hop neighborhood, built from hellos.
 *
 * Invariant: a node has an advertised set in `neighbors_of` iff it is in
 * `one_hop()`. Entries are indexed by NodeId.
 */
class NeighborView {
public:
    NeighborView() = default;
    explicit NeighborView(NodeId owner) : owner_(owner) {}

    [[nodiscard]] NodeId owner() const { return owner_; }
    [[nodiscard]] const NodeSet& one_hop() const { return one_hop_; }

    /// Records a hello from `neighbor` advertising its 1-hop set.
    void on_hello(NodeId neighbor, const NodeSet& advertised, SimTime now) {
        if (neighbor == owner_) return;
        grow(neighbor);
        auto& e = entries_[neighbor];
        e.advertised = advertised;
        e.last_heard = now;
        one_hop_.insert(neighbor);
    }

    /// Drops neighbors not heard since `now - horizon`.
    void expire(SimTime now, SimTime horizon) {
        one_hop_.for_each([&](NodeId id) {
            if (entries_[id].last_heard + horizon < now) one_hop_.erase(id);
        });
    }

    void remove(NodeId neighbor) { one_hop_.erase(neighbor); }

    /// Advertised 1-hop set of a current neighbor, or nullptr if unknown.
    [[nodiscard]] const NodeSet* neighbors_of(NodeId id) const {
        if (!one_hop_.contains(id)) return nullptr;
        return &entries_[id].advertised;
    }

    [[nodiscard]] SimTime last_heard(NodeId id) const {
        return one_hop_.contains(id) ? entries_[id].last_heard : -1.0;
    }

    /// N(x) if known, else {x}; the conservative degradation for stale data.
    [[nodiscard]] NodeSet neighbors_or_self(NodeId id) const {
        if (const NodeSet* n = neighbors_of(id)) return *n;
        NodeSet s;
        s.insert(id);
        return s;
    }

private:
    struct Entry {
        NodeSet advertised;
        SimTime last_heard = -1.0;
    };

    void grow(NodeId id) {
        if (entries_.size() <= id) entries_.resize(static_cast<std::size_t>(id) + 1);
    }

    NodeId owner_ = kNoNode;
    NodeSet one_hop_;
    std::vector<Entry> entries_;
};

/// N(N(v)): 1-hop set plus every neighbor's advertised set, excluding the owner.
inline NodeSet two_hop_set(const NeighborView& view) {
    NodeSet out = view.one_hop();
    view.one_hop().for_each([&](NodeId n) {
        if (const NodeSet* adv = view.neighbors_of(n)) out |= *adv;
    });
    if (view.owner() != kNoNode) out.erase(view.owner());
    return out;
}

/// Union of N(i) over a set of nodes, with unknown members contributing {i}.
inline NodeSet union_of_neighborhoods(const NeighborView& view, const NodeSet& nodes) {
    NodeSet out;
    nodes.for_each([&](NodeId i) { out |= view.neighbors_or_self(i); });
    return out;
}

}  // namespace nobcr
