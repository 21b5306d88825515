#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

#include "nobcr/core/packet.hpp"

namespace nobcr {

enum class Verdict : std::uint8_t { RelayEligible, Drop };

/**
 * Per-source MC/U state: a k-bit bitmap over the k most recent sequence
 * numbers, the largest sequence number seen, and the bit index holding it.
 *
 * Bit `mindex` corresponds to `sn_max`; bit (mindex - d) mod k corresponds to
 * sn_max - d for 0 <= d < k.
 */
class SourceWindow {
public:
    explicit SourceWindow(std::uint32_t k = 64) : k_(k), bm_((k + 63) / 64, 0) { assert(k > 0); }

    [[nodiscard]] std::uint32_t k() const { return k_; }
    [[nodiscard]] std::uint64_t sn_max() const { return sn_max_; }
    [[nodiscard]] std::uint32_t mindex() const { return mindex_; }

    [[nodiscard]] bool test(std::uint32_t i) const {
        assert(i < k_);
        return (bm_[i >> 6] >> (i & 63)) & 1U;
    }
    void set(std::uint32_t i) {
        assert(i < k_);
        bm_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }

    /// Clears bits [from, to]; an inverted range is a no-op.
    void zero(std::int64_t from, std::int64_t to) {
        if (to < from) return;
        assert(from >= 0 && to < static_cast<std::int64_t>(k_));
        for (auto i = from; i <= to; ++i)
            bm_[static_cast<std::size_t>(i) >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    [[nodiscard]] const std::vector<std::uint64_t>& bits() const { return bm_; }

    /// Advances the window to a new maximum sequence number. Requires sn > sn_max.
    void update(std::uint64_t sn) {
        assert(sn > sn_max_);
        const std::uint64_t offset = mindex_ + (sn - sn_max_);
        const auto next = static_cast<std::uint32_t>(offset % k_);
        const std::uint64_t rollover = offset / k_;
        if (rollover == 1) {
            zero(std::int64_t{mindex_} + 1, std::int64_t{k_} - 1);
            zero(0, std::int64_t{next} - 1);
        } else if (rollover > 1) {
            zero(0, std::int64_t{k_} - 1);
        } else {
            zero(std::int64_t{mindex_} + 1, std::int64_t{next} - 1);
        }
        mindex_ = next;
        sn_max_ = sn;
        set(mindex_);
    }

    /// Bit index for an in-window sequence number (sn_max - k < sn <= sn_max).
    [[nodiscard]] std::uint32_t index_of(std::uint64_t sn) const {
        std::int64_t index = static_cast<std::int64_t>(sn) - static_cast<std::int64_t>(sn_max_) + mindex_;
        if (index < 0) index += k_;
        return static_cast<std::uint32_t>(index);
    }

    [[nodiscard]] bool too_old(std::uint64_t sn) const { return sn_max_ >= k_ && sn <= sn_max_ - k_; }

    /// Decision without touching state.
    [[nodiscard]] Verdict peek(std::uint64_t sn) const {
        if (sn > sn_max_) return Verdict::RelayEligible;
        if (too_old(sn)) return Verdict::Drop;
        return test(index_of(sn)) ? Verdict::Drop : Verdict::RelayEligible;
    }

    friend bool operator==(const SourceWindow&, const SourceWindow&) = default;

private:
    std::uint32_t k_;
    std::vector<std::uint64_t> bm_;
    std::uint64_t sn_max_ = 0;
    std::uint32_t mindex_ = 0;
};

/// Applies the MC/U bitmap update for a packet newer than anything seen.
inline void mcu_update(const PacketId& p, SourceWindow& w) { w.update(p.sn); }

/**
 * MC/U duplicate decision. RelayEligible still means "relay only if this node
 * is an elected forwarder"; the caller checks that.
 */
inline Verdict mcu_relay_or_not(const PacketId& p, SourceWindow& w) {
    assert(p.sn >= 1);
    if (p.sn > w.sn_max()) {
        mcu_update(p, w);
        return Verdict::RelayEligible;
    }
    if (w.too_old(p.sn)) return Verdict::Drop;
    const auto index = w.index_of(p.sn);
    if (w.test(index)) return Verdict::Drop;
    w.set(index);
    return Verdict::RelayEligible;
}

}  // namespace nobcr
