#pragma once

#include <cassert>
#include <span>
#include <vector>

#include "nobcr/coding/pool.hpp"
#include "nobcr/coding/reception_table.hpp"

namespace nobcr {

/// A queued packet as seen by the detector: identity, estimated holders Z, gratis flag.
struct CodingCandidate {
    PacketId pid;
    NodeSet receivers;
    bool gratis = false;
};

/**
 * How gratis packets take part. They always come after the native pass;
 * normally only when natives alone already formed an encoding, except when
 * the head is an expiring native that has no further chance to be coded.
 */
enum class GratisPolicy { Exclude, AfterNatives, ExpiryException };

/// Constituents chosen to travel with the head packet, as indices into the queue.
struct EncodingPlan {
    std::vector<std::size_t> members;
    [[nodiscard]] std::size_t size() const { return members.size() + 1; }
};

namespace detail {

inline bool gratis_pass_allowed(GratisPolicy policy, std::size_t plan_size) {
    switch (policy) {
        case GratisPolicy::Exclude: return false;
        case GratisPolicy::AfterNatives: return plan_size >= 2;
        case GratisPolicy::ExpiryException: return true;
    }
    return false;
}

}  // namespace detail

/**
 * Greedy first-fit search for a coding opportunity around `head`.
 *
 * S tracks the nodes known to hold every constituent so far and C = N(v) - S.
 * A queued packet q joins when C - Z_q is empty, i.e. every neighbor lacking
 * some constituent already holds q. The queue is visited in the order given
 * (callers pass most-urgent first).
 */
inline EncodingPlan detect_coding(const NodeSet& one_hop, const CodingCandidate& head,
                                  std::span<const CodingCandidate> queue, GratisPolicy policy) {
    EncodingPlan plan;
    NodeSet s = head.receivers;
    NodeSet c = one_hop - s;

    auto pass = [&](bool gratis) {
        for (std::size_t i = 0; i < queue.size(); ++i) {
            const auto& q = queue[i];
            if (q.gratis != gratis || q.pid == head.pid) continue;
            if (!(c - q.receivers).empty()) continue;
            const NodeSet next = s & q.receivers;
            assert(next.is_subset_of(s));
            s = next;
            c = one_hop - s;
            plan.members.push_back(i);
        }
    };

    pass(false);
    if (detail::gratis_pass_allowed(policy, plan.size())) pass(true);
    return plan;
}

/**
 * Baseline detector: B' may grow by q only if every neighbor u is believed
 * (per the reception table) to hold at least |B'|-1 of B'.
 */
inline EncodingPlan detect_coding_reception_table(const NodeSet& one_hop, const CodingCandidate& head,
                                                  std::span<const CodingCandidate> queue,
                                                  const ReceptionTable& table, SimTime now, GratisPolicy policy) {
    EncodingPlan plan;
    const std::vector<NodeId> neighbors = one_hop.to_vector();
    std::vector<std::size_t> held(neighbors.size(), 0);
    for (std::size_t j = 0; j < neighbors.size(); ++j) held[j] = table.holds(neighbors[j], head.pid, now) ? 1 : 0;

    auto pass = [&](bool gratis) {
        for (std::size_t i = 0; i < queue.size(); ++i) {
            const auto& q = queue[i];
            if (q.gratis != gratis || q.pid == head.pid) continue;
            const std::size_t next_size = plan.size() + 1;
            bool ok = true;
            for (std::size_t j = 0; j < neighbors.size() && ok; ++j) {
                const std::size_t h = held[j] + (table.holds(neighbors[j], q.pid, now) ? 1 : 0);
                ok = h + 1 >= next_size;
            }
            if (!ok) continue;
            for (std::size_t j = 0; j < neighbors.size(); ++j)
                if (table.holds(neighbors[j], q.pid, now)) ++held[j];
            plan.members.push_back(i);
        }
    };

    pass(false);
    if (detail::gratis_pass_allowed(policy, plan.size())) pass(true);
    return plan;
}

/// A non-forwarder keeps p as gratis when some neighbor is estimated to lack it.
inline bool mark_gratis(const NodeSet& receivers, const NodeSet& one_hop, bool is_forwarder) {
    return !is_forwarder && !(one_hop - receivers).empty();
}

}  // namespace nobcr
