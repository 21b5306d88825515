#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nobcr/core/node_set.hpp"

namespace nobcr {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Termination { MU, RU, CU, MCU };
enum class CodingMode { None, Lightweight, ReceptionTable };
enum class Pruning { PDP, MultiPrev };
enum class MacMode { Csma, Aloha };

inline std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::MU: return "MU";
        case Termination::RU: return "RU";
        case Termination::CU: return "CU";
        case Termination::MCU: return "MCU";
    }
    return "?";
}
inline std::string_view to_string(CodingMode c) {
    switch (c) {
        case CodingMode::None: return "None";
        case CodingMode::Lightweight: return "Lightweight";
        case CodingMode::ReceptionTable: return "ReceptionTable";
    }
    return "?";
}
inline std::string_view to_string(Pruning p) { return p == Pruning::PDP ? "PDP" : "MultiPrev"; }
inline std::string_view to_string(MacMode m) { return m == MacMode::Csma ? "csma" : "aloha"; }

/// Everything needed to reproduce one simulation run.
struct ScenarioConfig {
    // topology and traffic
    std::uint32_t n_nodes = 60;
    double area_side = 886.0;     // m
    double tx_range = 250.0;      // m
    double sim_duration = 120.0;  // s, traffic generation horizon
    std::uint32_t n_sources = 20;
    double pkt_rate = 1.0;  // pkts/s per source
    std::uint32_t pkt_size = 256;
    double hello_interval = 1.0;
    double rad_max = 0.4;
    double pool_lifetime = 2.0;             // B_T
    double reception_table_lifetime = 5.0;  // R_T
    double mark_expiry = 5.0;               // M/U marks
    std::uint32_t mcu_window = 64;          // k
    double speed_min = 0.1;
    double speed_max = 1.0;
    double pause_time = 0.0;
    std::uint64_t seed = 1;

    // protocol variant
    Termination termination = Termination::MCU;
    CodingMode coding = CodingMode::Lightweight;
    bool coded_redundancy = true;
    Pruning pruning = Pruning::MultiPrev;
    bool gratis_receiving_rule = true;  // debug switch, off only in regression scripts

    // radio / engine
    double bandwidth = 2e6;         // b/s
    double phy_overhead = 192e-6;   // s, preamble per frame
    bool collisions = true;
    MacMode mac = MacMode::Csma;
    double mac_slot = 20e-6;
    double mac_difs = 50e-6;
    std::uint32_t mac_cw = 32;
    double cs_range = 550.0;  // m, carrier sense reach
    std::uint32_t mac_queue_limit = 50;  // frames, 0 = unbounded
    double warmup = 100.0;         // s of mobility before t=0
    double traffic_start = 3.0;    // s, earliest source start
    double drain = 5.0;            // s after sim_duration for in-flight packets
    double sample_interval = 1.0;  // s, storage sampling
    bool hellos = true;            // false: views are taken from the true topology

    [[nodiscard]] double hello_expiry() const { return 2.0 * hello_interval; }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
        };
        if (n_nodes == 0) throw ConfigError("n_nodes must be > 0");
        if (n_nodes > kMaxNodes)
            throw ConfigError("n_nodes exceeds capacity " + std::to_string(kMaxNodes));
        positive(area_side, "area_side");
        positive(tx_range, "tx_range");
        positive(sim_duration, "sim_duration");
        positive(pkt_rate, "pkt_rate");
        positive(hello_interval, "hello_interval");
        positive(pool_lifetime, "pool_lifetime");
        positive(reception_table_lifetime, "reception_table_lifetime");
        positive(mark_expiry, "mark_expiry");
        positive(bandwidth, "bandwidth");
        positive(sample_interval, "sample_interval");
        if (pkt_size == 0) throw ConfigError("pkt_size must be > 0");
        if (mcu_window == 0) throw ConfigError("mcu_window must be > 0");
        if (mac_cw == 0) throw ConfigError("mac_cw must be > 0");
        if (cs_range < 0.0) throw ConfigError("cs_range must be >= 0");
        if (n_sources > n_nodes) throw ConfigError("n_sources must not exceed n_nodes");
        if (rad_max < 0.0) throw ConfigError("rad_max must be >= 0");
        if (rad_max >= pool_lifetime) throw ConfigError("rad_max must be below pool_lifetime");
        if (speed_min < 0.0 || speed_max < speed_min)
            throw ConfigError("speeds must satisfy 0 <= speed_min <= speed_max");
        if (speed_max > 0.0 && speed_min == 0.0)
            throw ConfigError("speed_min must be > 0 for a mobile scenario");
        if (pause_time < 0.0 || warmup < 0.0 || traffic_start < 0.0 || drain < 0.0)
            throw ConfigError("times must be >= 0");
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad number for '" + key + "': " + v);
    }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError("bad integer for '" + key + "': " + v);
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean for '" + key + "': " + v);
}

inline std::string fmt_double(double d) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, p);
}

struct Field {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
Field uint_field(T ScenarioConfig::*m) {
    return {[m](ScenarioConfig& c, const std::string& v) { c.*m = static_cast<T>(parse_uint("", v)); },
            [m](const ScenarioConfig& c) { return std::to_string(c.*m); }};
}

inline Field double_field(double ScenarioConfig::*m) {
    return {[m](ScenarioConfig& c, const std::string& v) { c.*m = parse_double("", v); },
            [m](const ScenarioConfig& c) { return fmt_double(c.*m); }};
}

inline Field bool_field(bool ScenarioConfig::*m) {
    return {[m](ScenarioConfig& c, const std::string& v) { c.*m = parse_bool("", v); },
            [m](const ScenarioConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

template <typename E, std::size_t N>
Field enum_field(E ScenarioConfig::*m, const std::array<E, N>& values) {
    return {[m, values](ScenarioConfig& c, const std::string& v) {
                for (E e : values)
                    if (to_string(e) == v) {
                        c.*m = e;
                        return;
                    }
                throw ConfigError("bad value: " + v);
            },
            [m](const ScenarioConfig& c) { return std::string(to_string(c.*m)); }};
}

inline const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> f = {
        {"n_nodes", uint_field(&ScenarioConfig::n_nodes)},
        {"area_side", double_field(&ScenarioConfig::area_side)},
        {"tx_range", double_field(&ScenarioConfig::tx_range)},
        {"sim_duration", double_field(&ScenarioConfig::sim_duration)},
        {"n_sources", uint_field(&ScenarioConfig::n_sources)},
        {"pkt_rate", double_field(&ScenarioConfig::pkt_rate)},
        {"pkt_size", uint_field(&ScenarioConfig::pkt_size)},
        {"hello_interval", double_field(&ScenarioConfig::hello_interval)},
        {"rad_max", double_field(&ScenarioConfig::rad_max)},
        {"pool_lifetime", double_field(&ScenarioConfig::pool_lifetime)},
        {"reception_table_lifetime", double_field(&ScenarioConfig::reception_table_lifetime)},
        {"mark_expiry", double_field(&ScenarioConfig::mark_expiry)},
        {"mcu_window", uint_field(&ScenarioConfig::mcu_window)},
        {"speed_min", double_field(&ScenarioConfig::speed_min)},
        {"speed_max", double_field(&ScenarioConfig::speed_max)},
        {"pause_time", double_field(&ScenarioConfig::pause_time)},
        {"seed", uint_field(&ScenarioConfig::seed)},
        {"termination",
         enum_field(&ScenarioConfig::termination,
                    std::array{Termination::MU, Termination::RU, Termination::CU, Termination::MCU})},
        {"coding", enum_field(&ScenarioConfig::coding,
                              std::array{CodingMode::None, CodingMode::Lightweight,
                                         CodingMode::ReceptionTable})},
        {"coded_redundancy", bool_field(&ScenarioConfig::coded_redundancy)},
        {"pruning", enum_field(&ScenarioConfig::pruning, std::array{Pruning::PDP, Pruning::MultiPrev})},
        {"gratis_receiving_rule", bool_field(&ScenarioConfig::gratis_receiving_rule)},
        {"bandwidth", double_field(&ScenarioConfig::bandwidth)},
        {"phy_overhead", double_field(&ScenarioConfig::phy_overhead)},
        {"collisions", bool_field(&ScenarioConfig::collisions)},
        {"mac", enum_field(&ScenarioConfig::mac, std::array{MacMode::Csma, MacMode::Aloha})},
        {"mac_slot", double_field(&ScenarioConfig::mac_slot)},
        {"mac_difs", double_field(&ScenarioConfig::mac_difs)},
        {"mac_cw", uint_field(&ScenarioConfig::mac_cw)},
        {"cs_range", double_field(&ScenarioConfig::cs_range)},
        {"mac_queue_limit", uint_field(&ScenarioConfig::mac_queue_limit)},
        {"warmup", double_field(&ScenarioConfig::warmup)},
        {"traffic_start", double_field(&ScenarioConfig::traffic_start)},
        {"drain", double_field(&ScenarioConfig::drain)},
        {"sample_interval", double_field(&ScenarioConfig::sample_interval)},
        {"hellos", bool_field(&ScenarioConfig::hellos)},
    };
    return f;
}

}  // namespace detail

/// Sets one key; unknown keys and malformed values throw ConfigError.
inline void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const auto& f = detail::fields();
    auto it = f.find(key);
    if (it == f.end()) throw ConfigError("unknown config key: " + key);
    try {
        it->second.set(cfg, value);
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

inline std::string get_config_value(const ScenarioConfig& cfg, const std::string& key) {
    const auto& f = detail::fields();
    auto it = f.find(key);
    if (it == f.end()) throw ConfigError("unknown config key: " + key);
    return it->second.get(cfg);
}

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : detail::fields()) keys.push_back(k);
    return keys;
}

/// Applies a `key=value` assignment (as given to --set).
inline void apply_assignment(ScenarioConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got: " + std::string(assignment));
    set_config_value(cfg, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

/// Parses flat `key = value` text; `#` starts a comment. Starts from `base`.
inline ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = {}) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        try {
            apply_assignment(base, t);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

inline ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in, std::move(base));
}

inline std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    for (const auto& [k, f] : detail::fields()) out << k << " = " << f.get(cfg) << '\n';
    return out.str();
}

}  // namespace nobcr
