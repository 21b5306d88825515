#pragma once

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nobcr/core/node_set.hpp"
#include "nobcr/termination/source_window.hpp"

namespace nobcr {

/// M/U bookkeeping: which neighbors are marked as holding each packet, with expiry.
class MarkTable {
public:
    explicit MarkTable(SimTime expiry = 5.0) : expiry_(expiry) {}

    [[nodiscard]] SimTime expiry() const { return expiry_; }

    void mark(NodeId neighbor, const PacketId& p, SimTime now) {
        auto& marks = table_[p];
        for (auto& [n, until] : marks)
            if (n == neighbor) {
                until = now + expiry_;
                return;
            }
        marks.emplace_back(neighbor, now + expiry_);
    }

    [[nodiscard]] bool is_marked(NodeId neighbor, const PacketId& p, SimTime now) const {
        auto it = table_.find(p);
        if (it == table_.end()) return false;
        for (const auto& [n, until] : it->second)
            if (n == neighbor) return until > now;
        return false;
    }

    void evict(SimTime now) {
        for (auto it = table_.begin(); it != table_.end();) {
            auto& marks = it->second;
            std::erase_if(marks, [now](const auto& e) { return e.second <= now; });
            it = marks.empty() ? table_.erase(it) : std::next(it);
        }
    }

    [[nodiscard]] std::size_t items() const {
        std::size_t n = 0;
        for (const auto& [_, marks] : table_) n += marks.size();
        return n;
    }

    [[nodiscard]] std::size_t state_hash() const {
        // order-independent so the hash does not depend on bucket layout
        std::size_t h = 0;
        for (const auto& [pid, marks] : table_)
            for (const auto& [n, until] : marks)
                h += PacketIdHash{}(pid) * 31 + std::hash<NodeId>{}(n) * 7 + std::hash<double>{}(until);
        return h;
    }

private:
    SimTime expiry_;
    std::unordered_map<PacketId, std::vector<std::pair<NodeId, SimTime>>, PacketIdHash> table_;
};

inline void mu_mark(MarkTable& marks, NodeId neighbor, const PacketId& p, SimTime now) {
    marks.mark(neighbor, p, now);
}

/// RelayEligible iff some neighbor is not (or no longer) marked for p.
inline Verdict mu_check(const PacketId& p, const MarkTable& marks, const NodeSet& neighbors, SimTime now) {
    bool unmarked = false;
    neighbors.for_each([&](NodeId n) {
        if (!unmarked && !marks.is_marked(n, p, now)) unmarked = true;
    });
    return unmarked ? Verdict::RelayEligible : Verdict::Drop;
}

}  // namespace nobcr
