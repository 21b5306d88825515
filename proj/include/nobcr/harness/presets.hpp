#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "nobcr/core/config.hpp"
#include "nobcr/harness/csv.hpp"
#include "nobcr/harness/variants.hpp"

namespace nobcr {

/// One value of the swept parameter; it may set several keys (e.g. a speed range).
struct SweepPoint {
    std::string label;
    std::vector<std::string> assignments;
};

/**
 * A batch: every (variant, sweep point, seed) tuple is one run. Config is
 * layered base, then variant, then sweep point, then user overrides.
 */
struct ExperimentPreset {
    std::string name;
    std::string description;
    ScenarioConfig base;
    std::string sweep_key;
    std::vector<SweepPoint> sweep;
    std::vector<std::string> variants;
    std::uint32_t trials = 10;
    std::uint64_t first_seed = 1;

    [[nodiscard]] ScenarioConfig config_for(const std::string& variant, const SweepPoint& point, std::uint64_t seed,
                                            const std::vector<std::string>& overrides = {}) const {
        ScenarioConfig cfg = base;
        apply_variant(cfg, find_variant(variant));
        for (const auto& a : point.assignments) apply_assignment(cfg, a);
        for (const auto& a : overrides) apply_assignment(cfg, a);
        cfg.seed = seed;
        cfg.validate();
        return cfg;
    }

    void validate() const {
        if (variants.empty()) throw ConfigError("preset " + name + " has no variants");
        if (sweep.empty()) throw ConfigError("preset " + name + " has no sweep values");
        if (trials == 0) throw ConfigError("preset " + name + " has no trials");
        for (const auto& v : variants)
            for (const auto& p : sweep) (void)config_for(v, p, first_seed);
    }
};

/// Square side giving the requested mean neighborhood size, ignoring border effects.
inline double side_for_degree(std::uint32_t n_nodes, double degree, double range = 250.0) {
    return std::round(std::sqrt(n_nodes * std::numbers::pi * range * range / degree));
}

namespace detail {

constexpr double kSparseDegree = 15.0;
constexpr double kDenseDegree = 30.0;

inline std::string num(double d) { return csv::format_double(d); }

inline SweepPoint point(const std::string& key, double value) {
    return {num(value), {key + "=" + num(value)}};
}

inline ExperimentPreset scaled(const std::string& name, const std::string& description, bool desk, double degree) {
    ExperimentPreset p;
    p.name = name;
    p.description = description;
    if (desk) {
        p.base.n_nodes = 60;
        p.base.n_sources = 20;
        p.base.sim_duration = 120.0;
        p.trials = 10;
    } else {
        p.base.n_nodes = 100;
        p.base.n_sources = 50;
        p.base.sim_duration = 300.0;
        p.trials = 20;
    }
    p.base.pkt_rate = 1.0;
    p.base.speed_min = 0.1;
    p.base.speed_max = 1.0;
    p.base.area_side = side_for_degree(p.base.n_nodes, degree);
    return p;
}

inline std::vector<SweepPoint> speed_ranges(bool with_static) {
    std::vector<SweepPoint> out;
    if (with_static) out.push_back({"static", {"speed_min=0", "speed_max=0"}});
    out.push_back({"0-1", {"speed_min=0.1", "speed_max=1"}});
    out.push_back({"2-10", {"speed_min=2", "speed_max=10"}});
    out.push_back({"10-20", {"speed_min=10", "speed_max=20"}});
    return out;
}

inline ExperimentPreset load_sweep(const std::string& name, const std::string& description, bool desk,
                                   double degree) {
    ExperimentPreset p = scaled(name, description, desk, degree);
    p.variants = {"pdp-mu", "pdp-cu", "codeb", "nobcr", "nobcr-nocr"};
    if (desk) {
        // a small network needs a higher per-source rate to reach the congested regime
        p.sweep_key = "pkt_rate";
        for (double r : {1.0, 2.0, 3.0, 4.0, 5.0}) p.sweep.push_back(point("pkt_rate", r));
    } else {
        p.sweep_key = "n_sources";
        for (int s = 10; s <= 90; s += 10) p.sweep.push_back(point("n_sources", s));
    }
    return p;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
    return {"sparse-sources", "dense-sources", "scalability", "rad-sweep", "mobility", "storage", "coding-compare"};
}

inline ExperimentPreset make_preset(const std::string& name, bool desk) {
    using namespace detail;
    if (name == "sparse-sources")
        return load_sweep(name, "offered load in the sparse topology", desk, kSparseDegree);
    if (name == "dense-sources")
        return load_sweep(name, "offered load in the dense topology", desk, kDenseDegree);

    if (name == "scalability") {
        ExperimentPreset p = scaled(name, "network size at constant density", desk, kSparseDegree);
        p.variants = {"pdp-mu", "codeb", "nobcr"};
        p.sweep_key = "n_nodes";
        const std::vector<std::uint32_t> sizes =
            desk ? std::vector<std::uint32_t>{30, 45, 60} : std::vector<std::uint32_t>{60, 100, 150, 200, 250};
        for (std::uint32_t n : sizes)
            p.sweep.push_back({std::to_string(n),
                               {"n_nodes=" + std::to_string(n),
                                "area_side=" + num(side_for_degree(n, kSparseDegree))}});
        if (desk) p.base.pkt_rate = 2.0;
        return p;
    }
    if (name == "rad-sweep") {
        ExperimentPreset p = scaled(name, "random assessment delay under C/U and MC/U", desk, kSparseDegree);
        p.variants = {"pdp-cu", "pdp-mcu"};
        p.sweep_key = "rad_max";
        const std::vector<double> rads = desk ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4}
                                              : std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
        for (double r : rads) p.sweep.push_back(point("rad_max", r));
        if (desk) p.base.pkt_rate = 5.0;
        return p;
    }
    if (name == "mobility") {
        ExperimentPreset p = scaled(name, "node speed ranges", desk, kSparseDegree);
        p.variants = {"codeb", "nobcr"};
        p.sweep_key = "speed";
        p.sweep = speed_ranges(false);
        if (desk) p.base.pkt_rate = 2.0;
        return p;
    }
    if (name == "storage") {
        ExperimentPreset p = scaled(name, "items stored by the coding detector", desk, kSparseDegree);
        p.variants = {"nobcr", "nobcr-table"};
        p.sweep_key = "topology";
        const std::uint32_t n = p.base.n_nodes;
        p.sweep = {{"sparse", {"area_side=" + num(side_for_degree(n, kSparseDegree))}},
                   {"dense", {"area_side=" + num(side_for_degree(n, kDenseDegree))}}};
        return p;
    }
    if (name == "coding-compare") {
        ExperimentPreset p = scaled(name, "lightweight detector vs reception table", desk, kSparseDegree);
        p.variants = {"nobcr", "nobcr-table"};
        p.sweep_key = "speed";
        p.sweep = speed_ranges(true);
        return p;
    }
    throw ConfigError("unknown preset: " + name);
}

}  // namespace nobcr
