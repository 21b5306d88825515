#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nobcr/core/config.hpp"
#include "nobcr/protocol/node.hpp"
#include "nobcr/sim/event_queue.hpp"
#include "nobcr/sim/mobility.hpp"
#include "nobcr/sim/rng.hpp"

namespace nobcr {

struct StorageSample {
    SimTime time = 0.0;
    double lightweight = 0.0;  // mean Σ|H_p| per node
    double table = 0.0;        // mean Σ|R_u| per node
};

struct RunMetrics {
    std::uint64_t generated = 0;
    std::uint64_t deliveries = 0;
    double delivery_ratio = 0.0;
    std::uint64_t total_transmissions = 0;
    double forwards_per_packet = 0.0;
    double median_delay = 0.0;
    double mean_delay = 0.0;
    std::uint64_t native_tx = 0;
    std::uint64_t encoded_tx = 0;
    std::uint64_t encoded_with_gratis = 0;
    double coded_fraction = 0.0;         // encoded without gratis / all data tx
    double coded_fraction_gratis = 0.0;  // encoded with a gratis constituent / all data tx
    std::uint64_t decode_failures = 0;
    std::uint64_t coding_opportunities = 0;
    double stored_items_avg = 0.0;  // for the active detector
    double stored_items_lightweight_avg = 0.0;
    double stored_items_table_avg = 0.0;
    std::uint64_t hello_tx = 0;
    std::uint64_t collisions = 0;
    std::uint64_t queue_drops = 0;
    std::uint64_t payload_mismatches = 0;
    std::uint64_t gratis_state_violations = 0;
    std::uint64_t repeat_native_tx = 0;
    std::uint64_t termination_drops = 0;
    std::uint64_t gratis_expired = 0;
    std::uint64_t events = 0;

    std::vector<double> delays;  // one per delivery, in delivery order
    std::vector<StorageSample> storage;
};

struct TraceRecord {
    SimTime time = 0.0;
    NodeId node = kNoNode;
    std::string kind;
    PacketId pid;
    std::string detail;
};

/**
 * Discrete-event run of one scenario: random waypoint mobility, unit-disk
 * radio with overlap collisions, a per-node FIFO MAC, hellos and traffic.
 */
class Simulator final : public NodeContext {
public:
    explicit Simulator(ScenarioConfig cfg, std::vector<Vec2> fixed_positions = {})
        : cfg_(std::move(cfg)), rng_(cfg_.seed) {
        cfg_.validate();
        const NodeId n = cfg_.n_nodes;
        if (!fixed_positions.empty() && fixed_positions.size() != n)
            throw ConfigError("fixed positions must list every node");

        RandomWaypoint::Params mp{cfg_.area_side, cfg_.speed_min, cfg_.speed_max, cfg_.pause_time};
        for (NodeId i = 0; i < n; ++i) {
            if (!fixed_positions.empty())
                mobility_.push_back(RandomWaypoint::fixed(fixed_positions[i]));
            else
                mobility_.emplace_back(mp, rng_.mobility(i));
        }
        for (NodeId i = 0; i < n; ++i) nodes_.push_back(std::make_unique<Node>(i, cfg_, *this));
        mac_.resize(n);
        incoming_.resize(n);
        positions_.resize(n);

        if (cfg_.hellos) {
            for (NodeId i = 0; i < n; ++i)
                events_.push(uniform(rng_.jitter, 0.0, cfg_.hello_interval), Ev{EvKind::HelloTimer, i, 0});
        } else {
            events_.push(0.0, Ev{EvKind::ViewRefresh, 0, 0});
        }
    }

    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    [[nodiscard]] const ScenarioConfig& config() const { return cfg_; }
    [[nodiscard]] Node& node(NodeId id) { return *nodes_.at(id); }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }

    void set_trace(std::function<void(const TraceRecord&)> fn) { trace_fn_ = std::move(fn); }

    /// Replaces the next random assessment delays of `node` for `pid`; the last value repeats.
    void force_rad(NodeId node, const PacketId& pid, std::vector<double> delays) {
        forced_rad_[{node, pid.source, pid.sn}] = std::deque<double>(delays.begin(), delays.end());
    }

    /// Schedules a source transmission; `sn` 0 means the source's next number.
    void schedule_generate(SimTime t, NodeId node, std::uint64_t sn = 0) {
        events_.push(t, Ev{EvKind::ScriptGen, node, sn});
    }

    /// True unit-disk neighbors at the current time.
    [[nodiscard]] std::vector<NodeSet> true_topology() {
        refresh_positions();
        std::vector<NodeSet> adj(nodes_.size());
        for (NodeId i = 0; i < nodes_.size(); ++i)
            for (NodeId j = i + 1; j < nodes_.size(); ++j)
                if (distance(positions_[i], positions_[j]) <= cfg_.tx_range) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
        return adj;
    }

    /// Full scenario: random sources, traffic until sim_duration, then drain.
    RunMetrics run() {
        schedule_traffic();
        for (SimTime t = cfg_.traffic_start; t < cfg_.sim_duration; t += cfg_.sample_interval)
            events_.push(t, Ev{EvKind::Sample, 0, 0});
        run_until(cfg_.sim_duration + cfg_.drain);
        return metrics();
    }

    void run_until(SimTime end) {
        while (!events_.empty() && events_.top().time <= end) {
            auto e = events_.pop();
            now_ = e.time;
            ++event_count_;
            dispatch(e.payload);
        }
        now_ = std::max(now_, end);
    }

    [[nodiscard]] RunMetrics metrics() const {
        RunMetrics m;
        NodeCounters total;
        for (const auto& n : nodes_) total += n->counters();
        m.generated = generated_.size();
        m.deliveries = deliveries_;
        const double denom = static_cast<double>(m.generated) * static_cast<double>(nodes_.size() - 1);
        m.delivery_ratio = denom > 0 ? static_cast<double>(m.deliveries) / denom : 0.0;
        m.total_transmissions = total.data_tx;
        m.forwards_per_packet = m.generated > 0 ? static_cast<double>(total.data_tx) / m.generated : 0.0;
        m.delays = delays_;
        if (!delays_.empty()) {
            std::vector<double> sorted = delays_;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t k = sorted.size();
            m.median_delay = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
            m.mean_delay = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(k);
        }
        m.native_tx = total.native_tx;
        m.encoded_tx = total.encoded_tx;
        m.encoded_with_gratis = total.encoded_with_gratis;
        if (total.data_tx > 0) {
            m.coded_fraction = static_cast<double>(total.encoded_tx - total.encoded_with_gratis) / total.data_tx;
            m.coded_fraction_gratis = static_cast<double>(total.encoded_with_gratis) / total.data_tx;
        }
        m.decode_failures = total.decode_failures;
        m.coding_opportunities = total.encoded_tx;
        m.storage = storage_;
        if (!storage_.empty()) {
            for (const auto& s : storage_) {
                m.stored_items_lightweight_avg += s.lightweight;
                m.stored_items_table_avg += s.table;
            }
            m.stored_items_lightweight_avg /= static_cast<double>(storage_.size());
            m.stored_items_table_avg /= static_cast<double>(storage_.size());
        }
        switch (cfg_.coding) {
            case CodingMode::None: m.stored_items_avg = 0.0; break;
            case CodingMode::Lightweight: m.stored_items_avg = m.stored_items_lightweight_avg; break;
            case CodingMode::ReceptionTable: m.stored_items_avg = m.stored_items_table_avg; break;
        }
        m.hello_tx = hello_tx_;
        m.collisions = collisions_;
        m.queue_drops = queue_drops_;
        m.payload_mismatches = total.payload_mismatches;
        m.gratis_state_violations = total.gratis_state_violations;
        m.repeat_native_tx = total.repeat_native_tx;
        m.termination_drops = total.termination_drops;
        m.gratis_expired = total.gratis_expired;
        m.events = event_count_;
        return m;
    }

    // ---- NodeContext ----

    [[nodiscard]] SimTime now() const override { return now_; }

    double draw_rad(NodeId node, const PacketId& pid) override {
        auto it = forced_rad_.find({node, pid.source, pid.sn});
        if (it != forced_rad_.end() && !it->second.empty()) {
            const double d = it->second.front();
            if (it->second.size() > 1) it->second.pop_front();
            return d;
        }
        return uniform(rng_.rad, 0.0, cfg_.rad_max);
    }

    void transmit(NodeId node, Packet pkt) override {
        Frame f;
        f.bytes = pkt.wire_bytes();
        f.data = std::move(pkt);
        enqueue_frame(node, std::move(f));
    }

    void schedule_rad(NodeId node, std::uint64_t token, SimTime at) override {
        events_.push(std::max(at, now_), Ev{EvKind::RadExpiry, node, token});
    }

    void delivered(NodeId /*node*/, const PacketId& pid, SimTime origin_time) override {
        if (!generated_.contains(pid)) return;
        ++deliveries_;
        delays_.push_back(now_ - origin_time);
    }

    void trace(NodeId node, std::string_view kind, const PacketId& pid, std::string_view detail) override {
        if (trace_fn_) trace_fn_(TraceRecord{now_, node, std::string(kind), pid, std::string(detail)});
    }

private:
    enum class EvKind : std::uint8_t { HelloTimer, ViewRefresh, SourceGen, ScriptGen, RadExpiry, MacAttempt, TxEnd, Sample };

    struct Ev {
        EvKind kind;
        NodeId node;
        std::uint64_t arg;
    };

    struct Frame {
        bool hello = false;
        NodeSet hello_set;
        Packet data;
        std::size_t bytes = 0;
    };

    struct MacState {
        std::deque<Frame> queue;
        bool transmitting = false;
        bool attempt_pending = false;
    };

    struct Reception {
        std::uint64_t tx = 0;
        SimTime end = 0.0;
        bool corrupted = false;
    };

    struct Transmission {
        NodeId sender = kNoNode;
        SimTime end = 0.0;
        Frame frame;
        std::vector<NodeId> receivers;
    };

    struct RadKey {
        NodeId node;
        NodeId source;
        std::uint64_t sn;
        friend auto operator<=>(const RadKey&, const RadKey&) = default;
    };

    void dispatch(const Ev& e) {
        switch (e.kind) {
            case EvKind::HelloTimer: on_hello_timer(e.node); break;
            case EvKind::ViewRefresh: on_view_refresh(); break;
            case EvKind::SourceGen: on_source_gen(e.node); break;
            case EvKind::ScriptGen: generate(e.node, e.arg); break;
            case EvKind::RadExpiry: nodes_[e.node]->on_rad_expiry(e.arg); break;
            case EvKind::MacAttempt: on_mac_attempt(e.node); break;
            case EvKind::TxEnd: on_tx_end(e.arg); break;
            case EvKind::Sample: on_sample(); break;
        }
    }

    void refresh_positions() {
        if (positions_time_ == now_) return;
        for (NodeId i = 0; i < nodes_.size(); ++i) positions_[i] = mobility_[i].position(now_ + cfg_.warmup);
        positions_time_ = now_;
    }

    // ---- neighborhood ----

    void on_hello_timer(NodeId id) {
        Node& n = *nodes_[id];
        n.on_hello_timer();
        Frame f;
        f.hello = true;
        f.hello_set = n.hello_payload();
        f.bytes = 24 + 4 * f.hello_set.size();
        ++hello_tx_;
        enqueue_frame(id, std::move(f));
        events_.push(now_ + cfg_.hello_interval * uniform(rng_.jitter, 0.9, 1.1), Ev{EvKind::HelloTimer, id, 0});
    }

    void on_view_refresh() {
        const auto adj = true_topology();
        for (NodeId i = 0; i < nodes_.size(); ++i) {
            NeighborView v(i);
            adj[i].for_each([&](NodeId j) { v.on_hello(j, adj[j], now_); });
            nodes_[i]->set_view(std::move(v));
            nodes_[i]->housekeeping(now_);
        }
        // static scenarios never change; mobile ones refresh at the hello period
        if (cfg_.speed_max > 0.0)
            events_.push(now_ + cfg_.hello_interval, Ev{EvKind::ViewRefresh, 0, 0});
    }

    // ---- traffic ----

    void schedule_traffic() {
        std::vector<NodeId> ids(nodes_.size());
        std::iota(ids.begin(), ids.end(), NodeId{0});
        for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[uniform_below(rng_.traffic, i)]);
        ids.resize(cfg_.n_sources);
        std::sort(ids.begin(), ids.end());
        for (NodeId s : ids) {
            const SimTime start = cfg_.traffic_start + uniform(rng_.traffic, 0.0, 1.0 / cfg_.pkt_rate);
            events_.push(start, Ev{EvKind::SourceGen, s, 0});
        }
    }

    void on_source_gen(NodeId id) {
        if (now_ >= cfg_.sim_duration) return;
        generate(id, 0);
        events_.push(now_ + 1.0 / cfg_.pkt_rate, Ev{EvKind::SourceGen, id, 0});
    }

    void generate(NodeId id, std::uint64_t sn) {
        // register before the node runs, so deliveries triggered synchronously count
        const PacketId pid{id, sn == 0 ? peek_next_sn(id) : sn};
        generated_.insert(pid);
        const PacketId got = nodes_[id]->on_source_generate(sn);
        if (!(got == pid)) {
            generated_.erase(pid);
            generated_.insert(got);
        }
        next_sn_[id] = std::max(next_sn_[id], got.sn);
    }

    std::uint64_t peek_next_sn(NodeId id) { return next_sn_[id] + 1; }

    void on_sample() {
        StorageSample s;
        s.time = now_;
        for (const auto& n : nodes_) {
            s.lightweight += static_cast<double>(n->pool().stored_items(now_));
            s.table += static_cast<double>(n->table().stored_items(now_));
        }
        s.lightweight /= static_cast<double>(nodes_.size());
        s.table /= static_cast<double>(nodes_.size());
        storage_.push_back(s);
    }

    // ---- MAC and radio ----

    void enqueue_frame(NodeId id, Frame f) {
        MacState& m = mac_[id];
        if (cfg_.mac_queue_limit > 0 && m.queue.size() >= cfg_.mac_queue_limit) {
            ++queue_drops_;
            return;
        }
        m.queue.push_back(std::move(f));
        if (!m.transmitting && !m.attempt_pending) schedule_attempt(id, now_);
    }

    void schedule_attempt(NodeId id, SimTime from) {
        SimTime at = from;
        if (cfg_.mac == MacMode::Csma)
            at += cfg_.mac_difs + static_cast<double>(uniform_below(rng_.mac, cfg_.mac_cw)) * cfg_.mac_slot;
        mac_[id].attempt_pending = true;
        events_.push(at, Ev{EvKind::MacAttempt, id, 0});
    }

    /// End of the latest ongoing transmission this node can sense.
    [[nodiscard]] SimTime busy_until(NodeId id) {
        refresh_positions();
        SimTime until = -1.0;
        for (const auto& [_, tx] : active_)
            if (tx.sender != id && distance(positions_[id], positions_[tx.sender]) <= cfg_.cs_range)
                until = std::max(until, tx.end);
        for (const auto& r : incoming_[id]) until = std::max(until, r.end);
        return until;
    }

    void on_mac_attempt(NodeId id) {
        MacState& m = mac_[id];
        m.attempt_pending = false;
        if (m.transmitting || m.queue.empty()) return;
        if (cfg_.mac == MacMode::Csma) {
            const SimTime busy = busy_until(id);
            if (busy > now_) {
                schedule_attempt(id, busy);
                return;
            }
        }
        start_tx(id);
    }

    [[nodiscard]] double airtime(std::size_t bytes) const {
        return cfg_.phy_overhead + static_cast<double>(bytes) * 8.0 / cfg_.bandwidth;
    }

    void start_tx(NodeId id) {
        MacState& m = mac_[id];
        Transmission tx;
        tx.sender = id;
        tx.frame = std::move(m.queue.front());
        m.queue.pop_front();
        m.transmitting = true;

        const SimTime end = now_ + airtime(tx.frame.bytes);
        tx.end = end;
        const std::uint64_t tx_id = next_tx_++;
        refresh_positions();

        if (cfg_.collisions)
            for (auto& r : incoming_[id]) r.corrupted = true;  // half duplex

        for (NodeId r = 0; r < nodes_.size(); ++r) {
            if (r == id || distance(positions_[id], positions_[r]) > cfg_.tx_range) continue;
            Reception rec{tx_id, end, false};
            if (cfg_.collisions) {
                if (mac_[r].transmitting) rec.corrupted = true;
                if (!incoming_[r].empty()) {
                    rec.corrupted = true;
                    for (auto& other : incoming_[r]) other.corrupted = true;
                }
            }
            incoming_[r].push_back(rec);
            tx.receivers.push_back(r);
        }
        active_.emplace(tx_id, std::move(tx));
        events_.push(end, Ev{EvKind::TxEnd, id, tx_id});
    }

    void on_tx_end(std::uint64_t tx_id) {
        auto node_it = active_.find(tx_id);
        Transmission tx = std::move(node_it->second);
        active_.erase(node_it);
        mac_[tx.sender].transmitting = false;

        for (NodeId r : tx.receivers) {
            auto& in = incoming_[r];
            auto it = std::find_if(in.begin(), in.end(), [&](const Reception& x) { return x.tx == tx_id; });
            const bool corrupted = it->corrupted;
            in.erase(it);
            if (corrupted) {
                ++collisions_;
                continue;
            }
            if (tx.frame.hello)
                nodes_[r]->on_hello(tx.sender, tx.frame.hello_set);
            else
                nodes_[r]->on_receive(tx.frame.data);
        }
        MacState& m = mac_[tx.sender];
        if (!m.queue.empty() && !m.attempt_pending) schedule_attempt(tx.sender, now_);
    }

    ScenarioConfig cfg_;
    RngStreams rng_;
    std::vector<RandomWaypoint> mobility_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::vector<MacState> mac_;
    std::vector<std::vector<Reception>> incoming_;
    std::vector<Vec2> positions_;
    SimTime positions_time_ = -1.0;
    std::unordered_map<std::uint64_t, Transmission> active_;
    EventQueue<Ev> events_;
    SimTime now_ = 0.0;
    std::uint64_t next_tx_ = 1;
    std::uint64_t event_count_ = 0;

    std::map<RadKey, std::deque<double>> forced_rad_;
    std::map<NodeId, std::uint64_t> next_sn_;
    std::unordered_set<PacketId, PacketIdHash> generated_;
    std::uint64_t deliveries_ = 0;
    std::vector<double> delays_;
    std::vector<StorageSample> storage_;
    std::uint64_t hello_tx_ = 0;
    std::uint64_t collisions_ = 0;
    std::uint64_t queue_drops_ = 0;
    std::function<void(const TraceRecord&)> trace_fn_;
};

}  // namespace nobcr
