#pragma once

#include <map>

#include "nobcr/core/config.hpp"
#include "nobcr/termination/classic.hpp"
#include "nobcr/termination/mark_table.hpp"
#include "nobcr/termination/source_window.hpp"

namespace nobcr {

/**
 * Per-node duplicate-handling state for the configured criterion.
 *
 * Windows and classic records are created lazily on the first packet from a
 * source and kept for the whole run.
 */
class TerminationState {
public:
    TerminationState(Termination kind, std::uint32_t window_bits, SimTime mark_expiry)
        : kind_(kind), window_bits_(window_bits), marks_(mark_expiry) {}

    [[nodiscard]] Termination kind() const { return kind_; }

    /// Decision for a received native copy; mutates state as the criterion requires.
    Verdict check(const PacketId& p, const NodeSet& neighbors, SimTime now) {
        switch (kind_) {
            case Termination::MCU: return mcu_relay_or_not(p, window(p.source));
            case Termination::CU: return classic_check(p, classic_[p.source], ClassicMode::CU, false);
            case Termination::RU: return classic_check(p, classic_[p.source], ClassicMode::RU, false);
            case Termination::MU: return mu_check(p, marks_, neighbors, now);
        }
        return Verdict::Drop;
    }

    /// Same decision as check() but read-only.
    [[nodiscard]] Verdict peek(const PacketId& p, const NodeSet& neighbors, SimTime now) const {
        switch (kind_) {
            case Termination::MCU: {
                auto it = windows_.find(p.source);
                return it == windows_.end() ? Verdict::RelayEligible : it->second.peek(p.sn);
            }
            case Termination::CU:
            case Termination::RU: {
                auto it = classic_.find(p.source);
                const std::uint64_t last = it == classic_.end() ? 0 : it->second.sn_last;
                return p.sn > last ? Verdict::RelayEligible : Verdict::Drop;
            }
            case Termination::MU: return mu_check(p, marks_, neighbors, now);
        }
        return Verdict::Drop;
    }

    /// A copy of p was heard from `from`.
    void on_overheard(const PacketId& p, NodeId from, SimTime now) {
        if (kind_ == Termination::MU) mu_mark(marks_, from, p, now);
    }

    /// This node transmitted p (natively or as a non-gratis constituent).
    void on_transmitted(const PacketId& p, const NodeSet& neighbors, SimTime now) {
        if (kind_ == Termination::RU) classic_record_forward(p, classic_[p.source]);
        if (kind_ == Termination::MU) neighbors.for_each([&](NodeId n) { mu_mark(marks_, n, p, now); });
    }

    /// M/U re-evaluates when the RAD timer fires; the other criteria decided at reception.
    [[nodiscard]] bool still_needed(const PacketId& p, const NodeSet& neighbors, SimTime now) const {
        if (kind_ != Termination::MU) return true;
        return mu_check(p, marks_, neighbors, now) == Verdict::RelayEligible;
    }

    void evict(SimTime now) {
        if (kind_ == Termination::MU) marks_.evict(now);
    }

    [[nodiscard]] const MarkTable& marks() const { return marks_; }

    /// Digest of every stored structure, used to prove that gratis receptions leave it untouched.
    [[nodiscard]] std::size_t state_hash() const {
        std::size_t h = marks_.state_hash();
        for (const auto& [src, w] : windows_) {
            h = h * 1099511628211ULL + src;
            h = h * 1099511628211ULL + w.sn_max();
            h = h * 1099511628211ULL + w.mindex();
            for (auto word : w.bits()) h = h * 1099511628211ULL + word;
        }
        for (const auto& [src, c] : classic_) h = h * 1099511628211ULL + (std::size_t{src} << 32) + c.sn_last;
        return h;
    }

private:
    SourceWindow& window(NodeId source) {
        auto it = windows_.find(source);
        if (it == windows_.end()) it = windows_.emplace(source, SourceWindow(window_bits_)).first;
        return it->second;
    }

    Termination kind_;
    std::uint32_t window_bits_;
    std::map<NodeId, SourceWindow> windows_;
    std::map<NodeId, ClassicPerSource> classic_;
    MarkTable marks_;
};

}  // namespace nobcr
