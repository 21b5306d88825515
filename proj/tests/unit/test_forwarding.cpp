#include <bit>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "nobcr/forwarding/cover.hpp"

using namespace nobcr;

namespace {

using StdSet = std::set<NodeId>;

StdSet to_std(const NodeSet& s) {
    StdSet out;
    s.for_each([&](NodeId id) { out.insert(id); });
    return out;
}

NodeSet from_std(const StdSet& s) {
    NodeSet out;
    for (NodeId id : s) out.insert(id);
    return out;
}

/// Unit-disk graph on uniform random points.
std::vector<StdSet> geometric_graph(std::mt19937_64& rng, NodeId n, double side, double range) {
    std::uniform_real_distribution<double> u(0.0, side);
    std::vector<std::pair<double, double>> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    std::vector<StdSet> adj(n);
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second) <= range) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
    return adj;
}

NeighborView view_of(const std::vector<StdSet>& adj, NodeId v) {
    NeighborView view(v);
    for (NodeId u : adj[v]) view.on_hello(u, from_std(adj[u]), 0.0);
    return view;
}

StdSet minus(StdSet a, const StdSet& b) {
    for (NodeId x : b) a.erase(x);
    return a;
}

StdSet plus(StdSet a, const StdSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}

/// Direct set-algebra form of the single-previous-hop target.
StdSet pdp_oracle(const std::vector<StdSet>& adj, NodeId v, NodeId u) {
    StdSet two;
    for (NodeId w : adj[v]) two = plus(two, adj[w]);
    two = plus(two, adj[v]);
    StdSet target = minus(two, adj[v]);
    target = minus(target, adj[u]);
    for (NodeId w : adj[u])
        if (adj[v].contains(w)) target = minus(target, adj[w]);
    target.erase(v);
    target.erase(u);
    return target;
}

std::size_t brute_force_cover(const CoverProblem& p) {
    NodeSet reachable;
    for (const auto& [_, c] : p.candidates) reachable |= c;
    const NodeSet need = p.universe & reachable;
    if (need.empty()) return 0;
    const std::size_t m = p.candidates.size();
    std::size_t best = m;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        const auto k = static_cast<std::size_t>(std::popcount(mask));
        if (k >= best) continue;
        NodeSet got;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1u << i)) got |= p.candidates[i].second;
        if (need.is_subset_of(got)) best = k;
    }
    return best;
}

}  // namespace

TEST(PdpTarget, MatchesSetAlgebraOracle) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const auto adj = geometric_graph(rng, 40, 800.0, 250.0);
        for (NodeId v = 0; v < 40; ++v) {
            if (adj[v].empty()) continue;
            const NeighborView view = view_of(adj, v);
            for (NodeId u : adj[v]) ASSERT_EQ(to_std(pdp_cover_target(view, u)), pdp_oracle(adj, v, u));
        }
    }
}

TEST(PdpTarget, UnknownPreviousHopPrunesOnlyItself) {
    std::mt19937_64 rng(4);
    const auto adj = geometric_graph(rng, 30, 600.0, 250.0);
    const NeighborView view = view_of(adj, 0);
    const NodeId stranger = 400;  // no hello ever heard from it
    EXPECT_EQ(pdp_cover_target(view, stranger), two_hop_set(view) - view.one_hop());
}

TEST(MultiPrevTarget, IsSubsetOfSingleHopTarget) {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto adj = geometric_graph(rng, 50, 900.0, 250.0);
        for (NodeId v = 0; v < 50; ++v) {
            if (adj[v].size() < 2) continue;
            const NeighborView view = view_of(adj, v);
            const std::vector<NodeId> nbrs(adj[v].begin(), adj[v].end());
            const NodeId u = nbrs[rng() % nbrs.size()];
            NodeSet hops;
            hops.insert(u);
            for (NodeId w : nbrs)
                if (rng() % 3 == 0) hops.insert(w);
            const NodeSet multi = multiprev_cover_target(view, hops);
            ASSERT_TRUE(multi.is_subset_of(pdp_cover_target(view, u)));
            NodeSet single;
            single.insert(u);
            ASSERT_TRUE(candidate_forwarders(view, hops).is_subset_of(candidate_forwarders(view, single)));
            ++checked;
        }
    }
    EXPECT_GT(checked, 1000);
}

TEST(MultiPrevTarget, SingleHopReducesToPdp) {
    std::mt19937_64 rng(6);
    const auto adj = geometric_graph(rng, 40, 700.0, 250.0);
    for (NodeId v = 0; v < 40; ++v) {
        const NeighborView view = view_of(adj, v);
        for (NodeId u : adj[v]) {
            NodeSet h;
            h.insert(u);
            EXPECT_EQ(multiprev_cover_target(view, h), pdp_cover_target(view, u));
        }
    }
}

TEST(GreedyCover, WithinHarmonicBoundOfOptimum) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 2000; ++trial) {
        CoverProblem p;
        const NodeId universe = 4 + static_cast<NodeId>(rng() % 20);
        for (NodeId i = 0; i < universe; ++i)
            if (rng() % 4 != 0) p.universe.insert(i);
        const std::size_t m = 1 + rng() % 10;
        for (std::size_t c = 0; c < m; ++c) {
            NodeSet s;
            for (NodeId i = 0; i < universe; ++i)
                if (rng() % 3 == 0) s.insert(i);
            p.candidates.emplace_back(static_cast<NodeId>(100 + c), s);
        }
        const CoverResult got = greedy_set_cover(p);
        NodeSet covered;
        for (const auto& [id, s] : p.candidates)
            if (got.picked.contains(id)) covered |= s;
        NodeSet reachable;
        for (const auto& [_, s] : p.candidates) reachable |= s;
        ASSERT_TRUE((p.universe & reachable).is_subset_of(covered));
        ASSERT_EQ(got.uncovered, p.universe - reachable);

        const std::size_t opt = brute_force_cover(p);
        double harmonic = 0.0;
        for (std::size_t i = 1; i <= (p.universe & reachable).size(); ++i) harmonic += 1.0 / static_cast<double>(i);
        ASSERT_LE(static_cast<double>(got.picked.size()), harmonic * static_cast<double>(opt) + 1e-9);
    }
}

TEST(GreedyCover, TiesGoToLowestId) {
    CoverProblem p;
    p.universe.insert(1);
    NodeSet s;
    s.insert(1);
    p.candidates = {{7, s}, {3, s}, {5, s}};
    EXPECT_EQ(greedy_set_cover(p).picked.to_vector(), std::vector<NodeId>{3});
}

TEST(Election, ElectedForwardersCoverTheTarget) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto adj = geometric_graph(rng, 50, 900.0, 250.0);
        for (NodeId v = 0; v < 50; ++v) {
            if (adj[v].empty()) continue;
            const NeighborView view = view_of(adj, v);
            const NodeId u = *adj[v].begin();
            NodeSet hops;
            hops.insert(u);
            for (Pruning mode : {Pruning::PDP, Pruning::MultiPrev}) {
                const NodeSet fwd = elect_forwarders(view, hops, mode, u);
                const NodeSet target =
                    mode == Pruning::PDP ? pdp_cover_target(view, u) : multiprev_cover_target(view, hops);
                const NodeSet cand = candidate_forwarders(view, hops);
                ASSERT_TRUE(fwd.is_subset_of(cand));
                NodeSet reach, covered;
                cand.for_each([&](NodeId c) { reach |= *view.neighbors_of(c); });
                fwd.for_each([&](NodeId c) { covered |= *view.neighbors_of(c); });
                ASSERT_TRUE((target & reach).is_subset_of(covered));
            }
            const NodeSet src = elect_source_forwarders(view);
            NodeSet covered;
            src.for_each([&](NodeId c) { covered |= *view.neighbors_of(c); });
            ASSERT_TRUE((two_hop_set(view) - view.one_hop()).is_subset_of(covered));
        }
    }
}
