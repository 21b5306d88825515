#pragma once

#include <algorithm>
#include <cstdint>

#include "nobcr/termination/source_window.hpp"

namespace nobcr {

enum class ClassicMode : std::uint8_t { RU, CU };

/// Single stored sequence number per source: largest forwarded (R/U) or received (C/U).
struct ClassicPerSource {
    std::uint64_t sn_last = 0;
};

inline Verdict classic_check(const PacketId& p, ClassicPerSource& s, ClassicMode mode, bool did_forward) {
    const bool fresh = p.sn > s.sn_last;
    if (fresh && (mode == ClassicMode::CU || did_forward)) s.sn_last = p.sn;
    return fresh ? Verdict::RelayEligible : Verdict::Drop;
}

/// R/U bookkeeping once a packet has actually been transmitted.
inline void classic_record_forward(const PacketId& p, ClassicPerSource& s) {
    s.sn_last = std::max(s.sn_last, p.sn);
}

}  // namespace nobcr
