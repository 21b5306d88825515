#pragma once

#include <string>
#include <vector>

#include "nobcr/core/config.hpp"

namespace nobcr {

/// A named protocol configuration, expressed as config assignments over a scenario.
struct Variant {
    std::string name;
    std::string description;
    std::vector<std::string> assignments;
};

inline const std::vector<Variant>& known_variants() {
    static const std::vector<Variant> v = {
        {"config", "the scenario exactly as configured", {}},
        {"pdp-mu", "PDP forwarding, M/U termination, no coding",
         {"termination=MU", "coding=None", "pruning=PDP", "coded_redundancy=false", "rad_max=0"}},
        {"pdp-ru", "PDP forwarding, R/U termination, no coding",
         {"termination=RU", "coding=None", "pruning=PDP", "coded_redundancy=false", "rad_max=0"}},
        {"pdp-cu", "PDP forwarding, C/U termination, no coding",
         {"termination=CU", "coding=None", "pruning=PDP", "coded_redundancy=false", "rad_max=0"}},
        {"pdp-mcu", "PDP forwarding, MC/U termination, no coding",
         {"termination=MCU", "coding=None", "pruning=PDP", "coded_redundancy=false", "rad_max=0"}},
        {"codeb", "PDP with M/U and reception-table XOR coding",
         {"termination=MU", "coding=ReceptionTable", "pruning=PDP", "coded_redundancy=false", "rad_max=0.4",
          "pool_lifetime=5", "reception_table_lifetime=5"}},
        {"nobcr", "MC/U, lightweight coding, multi-hop pruning, coded redundancy",
         {"termination=MCU", "coding=Lightweight", "pruning=MultiPrev", "coded_redundancy=true", "rad_max=0.4",
          "pool_lifetime=2"}},
        {"nobcr-nocr", "nobcr without coded redundancy",
         {"termination=MCU", "coding=Lightweight", "pruning=MultiPrev", "coded_redundancy=false", "rad_max=0.4",
          "pool_lifetime=2"}},
        {"nobcr-table", "nobcr with the reception-table detector",
         {"termination=MCU", "coding=ReceptionTable", "pruning=MultiPrev", "coded_redundancy=true",
          "rad_max=0.4", "pool_lifetime=2", "reception_table_lifetime=5"}},
    };
    return v;
}

inline const Variant& find_variant(const std::string& name) {
    for (const auto& v : known_variants())
        if (v.name == name) return v;
    throw ConfigError("unknown variant: " + name);
}

inline void apply_variant(ScenarioConfig& cfg, const Variant& v) {
    for (const auto& a : v.assignments) apply_assignment(cfg, a);
}

}  // namespace nobcr
