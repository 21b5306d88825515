#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nobcr/harness/variants.hpp"
#include "nobcr/sim/simulator.hpp"

namespace nobcr {

class ScriptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One line of the replay log, with node and packet names as written in the script.
struct ScriptEvent {
    SimTime time = 0.0;
    std::string node;
    std::string kind;
    std::string packet;
    std::string detail;
};

struct ScriptResult {
    std::vector<ScriptEvent> events;
    RunMetrics metrics;

    [[nodiscard]] bool has(const std::string& node, const std::string& kind, const std::string& packet) const {
        for (const auto& e : events)
            if (e.node == node && e.kind == kind && e.packet == packet) return true;
        return false;
    }

    /// Accepted as new by `node`, either natively or as gratis.
    [[nodiscard]] bool received(const std::string& node, const std::string& packet) const {
        return has(node, "recv", packet) || has(node, "recv-gratis", packet);
    }

    [[nodiscard]] std::optional<SimTime> first(const std::string& node, const std::string& kind,
                                               const std::string& packet) const {
        for (const auto& e : events)
            if (e.node == node && e.kind == kind && e.packet == packet) return e.time;
        return std::nullopt;
    }
};

inline void write_log(std::ostream& out, const ScriptResult& r) {
    char buf[32];
    for (const auto& e : r.events) {
        std::snprintf(buf, sizeof buf, "%.6f", e.time);
        out << buf << ' ' << e.node << ' ' << e.kind << ' ' << e.packet;
        if (!e.detail.empty()) out << ' ' << e.detail;
        out << '\n';
    }
}

/**
 * Replays a hand-written scenario on fixed positions with forced RAD draws.
 *
 *   set <key>=<value>            scenario setting (before any node acts)
 *   variant <name>               protocol variant (same rule)
 *   node <name> <x> <y>          fixed position
 *   packet <name> <source> <sn>  names a packet of a node
 *   preload <node> <packet> [hops=a,b]   node already holds and accepted the packet
 *   enqueue <node> <packet> <deadline> [gratis]
 *   generate <time> <packet>     the packet's source originates it
 *   rad <node> <packet> <delay>...       next RAD draws for that pair, last one repeats
 *   run <time>                   advance the simulation
 *
 * Collisions, hellos and mobility are off unless a `set` turns them on.
 * Overrides given by the caller apply after the script's own settings.
 */
class ScriptRunner {
public:
    explicit ScriptRunner(std::vector<std::string> overrides = {}) : overrides_(std::move(overrides)) {
        for (const char* a : {"collisions=false", "hellos=false", "n_sources=0", "speed_min=0", "speed_max=0",
                              "warmup=0", "traffic_start=0", "drain=0"})
            apply_assignment(cfg_, a);
    }

    ScriptResult run(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            ++lineno_;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::vector<std::string> tok;
            for (std::string t; ls >> t;) tok.push_back(t);
            if (tok.empty()) continue;
            try {
                command(tok);
            } catch (const ScriptError&) {
                throw;
            } catch (const std::exception& e) {
                fail(e.what());
            }
        }
        start();
        result_.metrics = sim_->metrics();
        return std::move(result_);
    }

    ScriptResult run_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ScriptError("cannot open script: " + path);
        return run(in);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ScriptError("line " + std::to_string(lineno_) + ": " + msg);
    }

    void expect_args(const std::vector<std::string>& tok, std::size_t min, std::size_t max) const {
        if (tok.size() < min + 1 || tok.size() > max + 1) fail("wrong number of arguments for '" + tok[0] + "'");
    }

    NodeId node_id(const std::string& name) const {
        auto it = nodes_.find(name);
        if (it == nodes_.end()) fail("unknown node '" + name + "'");
        return it->second;
    }

    const PacketId& packet_id(const std::string& name) const {
        auto it = packets_.find(name);
        if (it == packets_.end()) fail("unknown packet '" + name + "'");
        return it->second;
    }

    static double number(const std::string& s) { return detail::parse_double("argument", s); }

    void before_start(const std::string& what) const {
        if (sim_) fail("'" + what + "' must come before the simulation starts");
    }

    void command(const std::vector<std::string>& tok) {
        const std::string& cmd = tok[0];
        if (cmd == "set") {
            expect_args(tok, 1, 1);
            before_start(cmd);
            apply_assignment(cfg_, tok[1]);
        } else if (cmd == "variant") {
            expect_args(tok, 1, 1);
            before_start(cmd);
            apply_variant(cfg_, find_variant(tok[1]));
        } else if (cmd == "node") {
            expect_args(tok, 3, 3);
            before_start(cmd);
            if (nodes_.contains(tok[1])) fail("duplicate node '" + tok[1] + "'");
            const auto id = static_cast<NodeId>(names_.size());
            nodes_[tok[1]] = id;
            names_.push_back(tok[1]);
            positions_.push_back({number(tok[2]), number(tok[3])});
        } else if (cmd == "packet") {
            expect_args(tok, 3, 3);
            if (packets_.contains(tok[1])) fail("duplicate packet '" + tok[1] + "'");
            const PacketId pid{node_id(tok[2]), detail::parse_uint("sn", tok[3])};
            if (pid.sn == 0) fail("sequence numbers start at 1");
            packets_[tok[1]] = pid;
            packet_names_[pid.to_string()] = tok[1];
        } else if (cmd == "preload") {
            expect_args(tok, 2, 3);
            const NodeId n = node_id(tok[1]);
            const PacketId& pid = packet_id(tok[2]);
            NodeSet hops;
            if (tok.size() == 4) {
                if (tok[3].rfind("hops=", 0) != 0) fail("expected hops=a,b");
                std::istringstream hs(tok[3].substr(5));
                for (std::string h; std::getline(hs, h, ',');)
                    if (!h.empty()) hops.insert(node_id(h));
            }
            start();
            sim_->node(n).preload(pid, hops, sim_->now(), sim_->now());
        } else if (cmd == "enqueue") {
            expect_args(tok, 3, 4);
            const NodeId n = node_id(tok[1]);
            const PacketId& pid = packet_id(tok[2]);
            const double deadline = number(tok[3]);
            bool gratis = false;
            if (tok.size() == 5) {
                if (tok[4] != "gratis") fail("expected 'gratis'");
                gratis = true;
            }
            start();
            if (!sim_->node(n).pool().holds(pid, sim_->now())) fail(tok[1] + " does not hold " + tok[2]);
            sim_->node(n).enqueue(pid, deadline, gratis);
        } else if (cmd == "generate") {
            expect_args(tok, 2, 2);
            const double t = number(tok[1]);
            const PacketId& pid = packet_id(tok[2]);
            start();
            if (t < sim_->now()) fail("generate time lies in the past");
            sim_->schedule_generate(t, pid.source, pid.sn);
        } else if (cmd == "rad") {
            if (tok.size() < 4) fail("rad needs a node, a packet and at least one delay");
            const NodeId n = node_id(tok[1]);
            const PacketId& pid = packet_id(tok[2]);
            std::vector<double> delays;
            for (std::size_t i = 3; i < tok.size(); ++i) {
                delays.push_back(number(tok[i]));
                if (delays.back() < 0) fail("negative delay");
            }
            start();
            sim_->force_rad(n, pid, delays);
        } else if (cmd == "run") {
            expect_args(tok, 1, 1);
            const double t = number(tok[1]);
            start();
            if (t < sim_->now()) fail("run time lies in the past");
            sim_->run_until(t);
        } else {
            fail("unknown command '" + cmd + "'");
        }
    }

    void start() {
        if (sim_) return;
        if (names_.empty()) fail("script declares no nodes");
        for (const auto& a : overrides_) apply_assignment(cfg_, a);
        cfg_.n_nodes = static_cast<std::uint32_t>(names_.size());
        cfg_.n_sources = 0;
        sim_ = std::make_unique<Simulator>(cfg_, positions_);
        sim_->set_trace([this](const TraceRecord& r) { record(r); });
        sim_->run_until(0.0);  // settle the initial neighbor views
    }

    std::string packet_name(const std::string& pid_text) const {
        auto it = packet_names_.find(pid_text);
        return it == packet_names_.end() ? pid_text : it->second;
    }

    void record(const TraceRecord& r) {
        ScriptEvent e{r.time, names_.at(r.node), r.kind, packet_name(r.pid.to_string()), {}};
        if (r.kind == "recv" || r.kind == "recv-gratis") {
            const auto from = static_cast<std::size_t>(std::stoul(r.detail));
            e.detail = "from=" + (from < names_.size() ? names_[from] : r.detail);
        } else {
            std::istringstream ds(r.detail);
            for (std::string t; ds >> t;) {
                const bool g = t.size() > 3 && t.ends_with("(g)");
                if (g) t.resize(t.size() - 3);
                if (!e.detail.empty()) e.detail += ' ';
                e.detail += packet_name(t) + (g ? "(g)" : "");
            }
        }
        result_.events.push_back(std::move(e));
    }

    ScenarioConfig cfg_;
    std::vector<std::string> overrides_;
    std::map<std::string, NodeId> nodes_;
    std::vector<std::string> names_;
    std::vector<Vec2> positions_;
    std::map<std::string, PacketId> packets_;
    std::map<std::string, std::string> packet_names_;
    std::unique_ptr<Simulator> sim_;
    ScriptResult result_;
    int lineno_ = 0;
};

}  // namespace nobcr
