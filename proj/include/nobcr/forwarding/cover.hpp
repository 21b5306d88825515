#pragma once

#include <cassert>
#include <utility>
#include <vector>

#include "nobcr/core/config.hpp"
#include "nobcr/core/neighbor_view.hpp"

namespace nobcr {

/// Nodes to cover (U(v)) and, per candidate forwarder, the nodes it reaches.
struct CoverProblem {
    NodeSet universe;
    std::vector<std::pair<NodeId, NodeSet>> candidates;  // ascending NodeId
};

struct CoverResult {
    NodeSet picked;
    NodeSet uncovered;  // universe members no candidate reaches
};

/**
 * Greedy set cover: repeatedly take the candidate covering the most
 * still-uncovered nodes, lowest NodeId on ties. Universe members that no
 * candidate reaches are reported, not treated as an error.
 */
inline CoverResult greedy_set_cover(const CoverProblem& problem) {
    CoverResult result;
    NodeSet reachable;
    for (const auto& [_, cov] : problem.candidates) reachable |= cov;
    result.uncovered = problem.universe - reachable;
    NodeSet remaining = problem.universe & reachable;

    std::vector<bool> used(problem.candidates.size(), false);
    while (!remaining.empty()) {
        std::size_t best = problem.candidates.size();
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < problem.candidates.size(); ++i) {
            if (used[i]) continue;
            const std::size_t gain = problem.candidates[i].second.intersection_size(remaining);
            if (gain > best_gain ||
                (gain == best_gain && gain > 0 && problem.candidates[i].first < problem.candidates[best].first)) {
                best = i;
                best_gain = gain;
            }
        }
        if (best_gain == 0) break;
        used[best] = true;
        result.picked.insert(problem.candidates[best].first);
        remaining -= problem.candidates[best].second;
    }
    return result;
}

/// PDP: U(v) = N(N(v)) - N(v) - N(u) - N(N(u) ∩ N(v)), minus v and u.
inline NodeSet pdp_cover_target(const NeighborView& view, NodeId prev_hop) {
    const NodeSet& one_hop = view.one_hop();
    NodeSet target = two_hop_set(view) - one_hop;
    target.erase(prev_hop);
    if (view.owner() != kNoNode) target.erase(view.owner());

    const NodeSet* prev_neighbors = view.neighbors_of(prev_hop);
    if (prev_neighbors == nullptr) return target;

    target -= *prev_neighbors;
    target -= union_of_neighborhoods(view, *prev_neighbors & one_hop);
    return target;
}

/// Multi-previous-hop target: every hop that relayed a copy prunes its own coverage.
inline NodeSet multiprev_cover_target(const NeighborView& view, const NodeSet& prev_hops) {
    assert(!prev_hops.empty());
    const NodeSet& one_hop = view.one_hop();
    NodeSet target = two_hop_set(view) - one_hop - prev_hops;
    if (view.owner() != kNoNode) target.erase(view.owner());

    prev_hops.for_each([&](NodeId i) {
        const NodeSet* ni = view.neighbors_of(i);
        if (ni == nullptr) return;  // contributes only {i}, already removed
        target -= *ni;
        target -= union_of_neighborhoods(view, *ni & one_hop);
    });
    return target;
}

/// C(v) = N(v) - ∪ N(i) - H, with unknown hops contributing {i}.
inline NodeSet candidate_forwarders(const NeighborView& view, const NodeSet& prev_hops) {
    NodeSet c = view.one_hop() - prev_hops;
    prev_hops.for_each([&](NodeId i) {
        if (const NodeSet* ni = view.neighbors_of(i)) c -= *ni;
    });
    return c;
}

inline CoverProblem make_cover_problem(const NeighborView& view, const NodeSet& universe, const NodeSet& candidates) {
    CoverProblem problem;
    problem.universe = universe;
    candidates.for_each([&](NodeId c) {
        if (const NodeSet* nc = view.neighbors_of(c)) problem.candidates.emplace_back(c, *nc);
    });
    return problem;
}

/**
 * Forwarder election for a relayed packet. Under PDP only the first previous
 * hop is used; under MultiPrev every hop in `prev_hops` prunes both the target
 * and the candidate set.
 */
inline NodeSet elect_forwarders(const NeighborView& view, const NodeSet& prev_hops, Pruning mode,
                                NodeId first_hop) {
    assert(!prev_hops.empty());
    NodeSet universe;
    NodeSet candidates;
    if (mode == Pruning::PDP) {
        NodeSet u;
        u.insert(first_hop);
        universe = pdp_cover_target(view, first_hop);
        candidates = candidate_forwarders(view, u);
    } else {
        universe = multiprev_cover_target(view, prev_hops);
        candidates = candidate_forwarders(view, prev_hops);
    }
    return greedy_set_cover(make_cover_problem(view, universe, candidates)).picked;
}

/// At the source nothing is known to be covered: U(v) = N(N(v)) - N(v), C(v) = N(v).
inline NodeSet elect_source_forwarders(const NeighborView& view) {
    NodeSet universe = two_hop_set(view) - view.one_hop();
    return greedy_set_cover(make_cover_problem(view, universe, view.one_hop())).picked;
}

}  // namespace nobcr
