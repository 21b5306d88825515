#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "nobcr/termination/policy.hpp"

using namespace nobcr;

namespace {

/// Reference duplicate detector that remembers every sequence number ever seen.
struct FullHistory {
    std::set<std::uint64_t> seen;
    std::uint64_t max = 0;

    bool in_window(std::uint64_t sn, std::uint32_t k) const { return max < k || sn > max - k; }

    /// Only meaningful for in-window packets.
    Verdict decide(std::uint64_t sn) {
        const bool dup = seen.contains(sn);
        seen.insert(sn);
        max = std::max(max, sn);
        return dup ? Verdict::Drop : Verdict::RelayEligible;
    }
};

/// Stream of sequence numbers with duplicates and bounded reordering.
std::vector<std::uint64_t> reordered_stream(std::mt19937_64& rng, std::size_t len, std::uint32_t depth) {
    std::vector<std::uint64_t> s;
    std::uint64_t next = 1;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (s.size() < len) {
        const double r = u(rng);
        if (r < 0.5 || s.empty()) {
            next += 1 + (u(rng) < 0.1 ? static_cast<std::uint64_t>(u(rng) * 3 * depth) : 0);
            s.push_back(next);
        } else {
            // a copy or a late arrival of something recent
            const auto back = static_cast<std::uint64_t>(u(rng) * depth);
            s.push_back(next > back ? next - back : 1);
        }
    }
    return s;
}

/// Bitmap expected after a sequence of accepted sequence numbers: bit (sn mod k) for in-window sns.
std::vector<std::uint64_t> rebuild(const std::set<std::uint64_t>& seen, std::uint64_t sn_max, std::uint32_t k) {
    std::vector<std::uint64_t> bm((k + 63) / 64, 0);
    for (std::uint64_t sn : seen)
        if (sn + k > sn_max) bm[(sn % k) >> 6] |= std::uint64_t{1} << ((sn % k) & 63);
    return bm;
}

}  // namespace

TEST(McuWindow, AgreesWithFullHistoryWithinWindow) {
    std::mt19937_64 rng(2024);
    for (std::uint32_t k : {1u, 5u, 64u, 100u}) {
        for (int stream = 0; stream < 40; ++stream) {
            SourceWindow w(k);
            FullHistory oracle;
            for (std::uint64_t sn : reordered_stream(rng, 2000, k)) {
                const bool in = oracle.in_window(sn, k);
                const Verdict got = mcu_relay_or_not(PacketId{1, sn}, w);
                if (in)
                    ASSERT_EQ(got, oracle.decide(sn)) << "k=" << k << " sn=" << sn;
                else
                    ASSERT_EQ(got, Verdict::Drop) << "out of window must drop, sn=" << sn;
            }
        }
    }
}

TEST(McuWindow, BitmapMatchesRebuildAcrossRollovers) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 130);
        SourceWindow w(k);
        std::set<std::uint64_t> seen;
        std::uint64_t top = 0;
        for (int step = 0; step < 60; ++step) {
            std::uint64_t sn;
            switch (rng() % 4) {
                case 0: sn = top + 1; break;                        // no rollover
                case 1: sn = top + 1 + rng() % (k + 1); break;      // at most one rollover
                case 2: sn = top + k + 1 + rng() % (3 * k); break;  // several rollovers
                default: sn = top > 0 ? 1 + rng() % top : 1; break; // old or duplicate
            }
            if (mcu_relay_or_not(PacketId{0, sn}, w) == Verdict::RelayEligible) seen.insert(sn);
            top = std::max(top, sn);
            ASSERT_EQ(w.sn_max(), top);
            ASSERT_EQ(w.mindex(), top % k);
            ASSERT_EQ(w.bits(), rebuild(seen, top, k)) << "k=" << k << " step=" << step;
        }
    }
}

TEST(McuWindow, PeekDoesNotMutate) {
    SourceWindow w(8);
    (void)mcu_relay_or_not(PacketId{0, 5}, w);
    const SourceWindow before = w;
    EXPECT_EQ(w.peek(3), Verdict::RelayEligible);
    EXPECT_EQ(w.peek(5), Verdict::Drop);
    EXPECT_EQ(w.peek(9), Verdict::RelayEligible);
    EXPECT_EQ(w, before);
}

TEST(McuWindow, ReorderingIsTolerated) {
    // the situation single-number criteria get wrong: p2 first, then p1
    SourceWindow w(64);
    EXPECT_EQ(mcu_relay_or_not(PacketId{0, 2}, w), Verdict::RelayEligible);
    EXPECT_EQ(mcu_relay_or_not(PacketId{0, 1}, w), Verdict::RelayEligible);
    EXPECT_EQ(mcu_relay_or_not(PacketId{0, 1}, w), Verdict::Drop);
    EXPECT_EQ(mcu_relay_or_not(PacketId{0, 2}, w), Verdict::Drop);
}

TEST(Classic, CoveredUncoveredDropsLateOlderPacket) {
    ClassicPerSource s;
    EXPECT_EQ(classic_check(PacketId{0, 2}, s, ClassicMode::CU, false), Verdict::RelayEligible);
    EXPECT_EQ(classic_check(PacketId{0, 1}, s, ClassicMode::CU, false), Verdict::Drop);
    EXPECT_EQ(s.sn_last, 2u);
}

TEST(Classic, RelayedUncoveredOnlyCountsForwardedPackets) {
    ClassicPerSource s;
    EXPECT_EQ(classic_check(PacketId{0, 5}, s, ClassicMode::RU, false), Verdict::RelayEligible);
    EXPECT_EQ(s.sn_last, 0u);  // received, not forwarded
    EXPECT_EQ(classic_check(PacketId{0, 5}, s, ClassicMode::RU, false), Verdict::RelayEligible);
    classic_record_forward(PacketId{0, 5}, s);
    EXPECT_EQ(classic_check(PacketId{0, 5}, s, ClassicMode::RU, false), Verdict::Drop);
    EXPECT_EQ(classic_check(PacketId{0, 4}, s, ClassicMode::RU, false), Verdict::Drop);
}

TEST(MarkTable, MarksExpire) {
    MarkTable m(5.0);
    const PacketId p{1, 1};
    NodeSet nbrs;
    nbrs.insert(2);
    nbrs.insert(3);
    EXPECT_EQ(mu_check(p, m, nbrs, 0.0), Verdict::RelayEligible);
    mu_mark(m, 2, p, 0.0);
    EXPECT_EQ(mu_check(p, m, nbrs, 1.0), Verdict::RelayEligible);
    mu_mark(m, 3, p, 1.0);
    EXPECT_EQ(mu_check(p, m, nbrs, 2.0), Verdict::Drop);
    EXPECT_EQ(mu_check(p, m, nbrs, 5.5), Verdict::RelayEligible);  // mark on 2 lapsed
    m.evict(5.5);
    EXPECT_EQ(m.items(), 1u);
    m.evict(6.5);
    EXPECT_EQ(m.items(), 0u);
}

TEST(TerminationState, PeekAgreesWithCheckAndNeverMutates) {
    std::mt19937_64 rng(5);
    for (Termination kind : {Termination::MU, Termination::RU, Termination::CU, Termination::MCU}) {
        TerminationState t(kind, 16, 5.0);
        NodeSet nbrs;
        for (NodeId i = 1; i <= 4; ++i) nbrs.insert(i);
        for (int i = 0; i < 3000; ++i) {
            const PacketId p{static_cast<NodeId>(rng() % 3), 1 + rng() % 40};
            const double now = i * 0.01;
            if (rng() % 3 == 0) t.on_overheard(p, 1 + static_cast<NodeId>(rng() % 4), now);
            const std::size_t h = t.state_hash();
            const Verdict peeked = t.peek(p, nbrs, now);
            ASSERT_EQ(t.state_hash(), h);
            ASSERT_EQ(t.check(p, nbrs, now), peeked) << to_string(kind);
            if (peeked == Verdict::RelayEligible && rng() % 2) t.on_transmitted(p, nbrs, now);
        }
    }
}

TEST(TerminationState, OwnTransmissionMarksAllNeighborsUnderMu) {
    TerminationState t(Termination::MU, 16, 5.0);
    NodeSet nbrs;
    nbrs.insert(1);
    nbrs.insert(2);
    const PacketId p{9, 1};
    EXPECT_TRUE(t.still_needed(p, nbrs, 0.0));
    t.on_transmitted(p, nbrs, 0.0);
    EXPECT_FALSE(t.still_needed(p, nbrs, 0.1));
}
