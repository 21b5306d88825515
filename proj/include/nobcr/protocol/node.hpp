#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nobcr/coding/detect.hpp"
#include "nobcr/coding/pool.hpp"
#include "nobcr/coding/reception_table.hpp"
#include "nobcr/coding/xor.hpp"
#include "nobcr/core/config.hpp"
#include "nobcr/core/neighbor_view.hpp"
#include "nobcr/forwarding/cover.hpp"
#include "nobcr/termination/policy.hpp"

namespace nobcr {

/// What a node needs from its surroundings: clock, randomness, the radio and a metrics/log sink.
class NodeContext {
public:
    virtual ~NodeContext() = default;
    [[nodiscard]] virtual SimTime now() const = 0;
    virtual double draw_rad(NodeId node, const PacketId& pid) = 0;
    virtual void transmit(NodeId node, Packet pkt) = 0;
    virtual void schedule_rad(NodeId node, std::uint64_t token, SimTime at) = 0;
    /// `node` accepted `pid` as new for the first time.
    virtual void delivered(NodeId node, const PacketId& pid, SimTime origin_time) = 0;
    virtual void trace(NodeId /*node*/, std::string_view /*kind*/, const PacketId& /*pid*/,
                       std::string_view /*detail*/) {}
};

struct NodeCounters {
    std::uint64_t generated = 0;
    std::uint64_t data_tx = 0;
    std::uint64_t native_tx = 0;
    std::uint64_t encoded_tx = 0;
    std::uint64_t encoded_with_gratis = 0;
    std::uint64_t coded_constituents = 0;
    std::uint64_t decode_failures = 0;
    std::uint64_t payload_mismatches = 0;
    std::uint64_t termination_drops = 0;
    std::uint64_t gratis_buffered = 0;
    std::uint64_t gratis_expired = 0;
    std::uint64_t gratis_state_violations = 0;
    std::uint64_t mu_cancelled = 0;
    std::uint64_t repeat_native_tx = 0;

    NodeCounters& operator+=(const NodeCounters& o) {
        generated += o.generated;
        data_tx += o.data_tx;
        native_tx += o.native_tx;
        encoded_tx += o.encoded_tx;
        encoded_with_gratis += o.encoded_with_gratis;
        coded_constituents += o.coded_constituents;
        decode_failures += o.decode_failures;
        payload_mismatches += o.payload_mismatches;
        termination_drops += o.termination_drops;
        gratis_buffered += o.gratis_buffered;
        gratis_expired += o.gratis_expired;
        gratis_state_violations += o.gratis_state_violations;
        mu_cancelled += o.mu_cancelled;
        repeat_native_tx += o.repeat_native_tx;
        return *this;
    }
};

/// A packet waiting out its random assessment delay.
struct QueuedEntry {
    PacketId pid;
    SimTime deadline = 0.0;
    bool gratis = false;
    std::uint64_t token = 0;
};

/**
 * One broadcast node: termination, forwarder election, coding and gratis
 * handling around a RAD output queue. Driven entirely by the event loop
 * through the on_* entry points.
 */
class Node {
public:
    Node(NodeId id, const ScenarioConfig& cfg, NodeContext& ctx)
        : id_(id),
          cfg_(&cfg),
          ctx_(&ctx),
          view_(id),
          term_(cfg.termination, cfg.mcu_window, cfg.mark_expiry),
          pool_(cfg.pool_lifetime),
          table_(cfg.reception_table_lifetime) {}

    [[nodiscard]] NodeId id() const { return id_; }
    [[nodiscard]] const NeighborView& view() const { return view_; }
    [[nodiscard]] const PacketPool& pool() const { return pool_; }
    [[nodiscard]] const ReceptionTable& table() const { return table_; }
    [[nodiscard]] const TerminationState& termination() const { return term_; }
    [[nodiscard]] const std::vector<QueuedEntry>& out_queue() const { return queue_; }
    [[nodiscard]] const NodeCounters& counters() const { return counters_; }

    /// Replaces the neighborhood knowledge wholesale (used when views come from the true topology).
    void set_view(NeighborView view) { view_ = std::move(view); }

    /**
     * Preloads a packet this node already accepted earlier, with the given
     * previous hops as if they had been overheard at `now`.
     */
    PoolEntry& preload(const PacketId& pid, const NodeSet& hops, SimTime origin_time, SimTime now) {
        PoolEntry& e = pool_.insert(pid, make_payload(pid, cfg_->pkt_size), origin_time, now);
        hops.for_each([&](NodeId h) { e.add_hop(h, now); });
        (void)term_.check(pid, view_.one_hop(), now);
        accepted_.insert(pid);
        return e;
    }

    /// Puts a held packet into the output queue with an explicit deadline.
    void enqueue(const PacketId& pid, SimTime deadline, bool gratis) { push_queue(pid, deadline, gratis); }

    // ---- hellos ----

    [[nodiscard]] NodeSet hello_payload() const { return view_.one_hop(); }

    void on_hello(NodeId from, const NodeSet& advertised) { view_.on_hello(from, advertised, ctx_->now()); }

    /// Periodic housekeeping on the hello timer.
    void on_hello_timer() {
        const SimTime now = ctx_->now();
        view_.expire(now, cfg_->hello_expiry());
        housekeeping(now);
    }

    void housekeeping(SimTime now) {
        pool_.evict(now, [this](const PacketId& p) { return queued(p) != queue_.end(); });
        table_.evict(now);
        term_.evict(now);
        std::erase_if(gratis_seen_, [now](const auto& kv) { return kv.second <= now; });
    }

    // ---- traffic ----

    /// Originates the next packet of this source (or the given sequence number) and sends it at once.
    PacketId on_source_generate(std::uint64_t sn = 0) {
        const SimTime now = ctx_->now();
        next_sn_ = sn == 0 ? next_sn_ + 1 : std::max(next_sn_, sn);
        const PacketId pid{id_, sn == 0 ? next_sn_ : sn};
        ++counters_.generated;
        pool_.insert(pid, make_payload(pid, cfg_->pkt_size), now, now);
        (void)term_.check(pid, view_.one_hop(), now);
        ctx_->trace(id_, "gen", pid, "");

        Packet pkt;
        pkt.kind = PacketKind::Native;
        pkt.tx_node = id_;
        pkt.payload = pool_.find(pid, now)->payload;
        pkt.constituents.push_back({pid, elect_source_forwarders(view_), false, now});
        send(std::move(pkt), now);
        return pid;
    }

    // ---- data reception ----

    void on_receive(const Packet& pkt) {
        const SimTime now = ctx_->now();
        const NodeId from = pkt.tx_node;

        if (pkt.kind == PacketKind::Native) {
            if (pkt.constituents.size() != 1) return;
            handle_constituent(pkt.constituents.front(), pkt.payload, from, now);
            return;
        }

        const DecodeResult res = decode(pkt, pool_, now);
        if (res.failure) {
            ++counters_.decode_failures;
            for (std::size_t i : res.known) note_copy(pkt.constituents[i], from, now);
            for (const auto& c : pkt.constituents) ctx_->trace(id_, "decode-fail", c.pid, "");
            return;
        }
        // resolve every payload before processing, since processing may change the pool
        std::vector<Payload> payloads(pkt.constituents.size());
        for (std::size_t i : res.known) payloads[i] = pool_.find(pkt.constituents[i].pid, now)->payload;
        if (res.recovered_index) payloads[*res.recovered_index] = res.recovered_payload;
        for (std::size_t i = 0; i < pkt.constituents.size(); ++i)
            handle_constituent(pkt.constituents[i], payloads[i], from, now);
    }

    // ---- RAD expiry ----

    void on_rad_expiry(std::uint64_t token) {
        const SimTime now = ctx_->now();
        auto it = std::find_if(queue_.begin(), queue_.end(), [&](const QueuedEntry& q) { return q.token == token; });
        if (it == queue_.end()) return;  // already left inside an encoding
        const QueuedEntry head = *it;
        queue_.erase(it);

        if (head.gratis) {
            expire_gratis(head, now);
            return;
        }
        if (!term_.still_needed(head.pid, view_.one_hop(), now)) {
            ++counters_.mu_cancelled;
            ctx_->trace(id_, "cancel", head.pid, "");
            return;
        }
        std::vector<QueuedEntry> plan{head};
        if (coding_enabled()) {
            for (std::size_t i : find_plan(head, GratisPolicy::ExpiryException)) plan.push_back(queue_[i]);
        }
        transmit_plan(plan, now);
    }

private:
    using QueueIt = std::vector<QueuedEntry>::iterator;

    [[nodiscard]] bool coding_enabled() const { return cfg_->coding != CodingMode::None; }

    QueueIt queued(const PacketId& pid) {
        return std::find_if(queue_.begin(), queue_.end(), [&](const QueuedEntry& q) { return q.pid == pid; });
    }

    void push_queue(const PacketId& pid, SimTime deadline, bool gratis) {
        QueuedEntry e{pid, deadline, gratis, next_token_++};
        auto pos = std::upper_bound(queue_.begin(), queue_.end(), e, [](const QueuedEntry& a, const QueuedEntry& b) {
            return a.deadline != b.deadline ? a.deadline < b.deadline : a.token < b.token;
        });
        queue_.insert(pos, e);
        ctx_->schedule_rad(id_, e.token, deadline);
    }

    void buffer(const PacketId& pid, bool gratis, SimTime now) {
        const double delay = ctx_->draw_rad(id_, pid);
        push_queue(pid, now + delay, gratis);
        ctx_->trace(id_, gratis ? "buffer-gratis" : "buffer", pid, "");
    }

    /// Hops recent enough that every neighbor who heard them still has the packet pooled.
    [[nodiscard]] NodeSet trusted_hops(const PoolEntry& e, SimTime now) const {
        return e.hops_since(now - 0.75 * cfg_->pool_lifetime);
    }

    [[nodiscard]] CodingCandidate candidate(const PacketId& pid, bool gratis, SimTime now) const {
        CodingCandidate c{pid, {}, gratis};
        if (const PoolEntry* e = pool_.find(pid, now)) c.receivers = receivers_of(trusted_hops(*e, now), view_);
        return c;
    }

    /// Queue indices that can join `head` in one encoding; gratis entries other than `only_gratis` are skipped.
    std::vector<std::size_t> find_plan(const QueuedEntry& head, GratisPolicy policy,
                                       const QueuedEntry* only_gratis = nullptr) {
        const SimTime now = ctx_->now();
        std::vector<CodingCandidate> cands;
        std::vector<std::size_t> index;
        cands.reserve(queue_.size() + 1);
        for (std::size_t i = 0; i < queue_.size(); ++i) {
            const auto& q = queue_[i];
            if (only_gratis != nullptr && q.gratis) continue;
            cands.push_back(candidate(q.pid, q.gratis, now));
            index.push_back(i);
        }
        if (only_gratis != nullptr) {
            cands.push_back(candidate(only_gratis->pid, true, now));
            index.push_back(queue_.size());
        }
        const CodingCandidate h = candidate(head.pid, head.gratis, now);
        const EncodingPlan plan =
            cfg_->coding == CodingMode::ReceptionTable
                ? detect_coding_reception_table(view_.one_hop(), h, cands, table_, now, policy)
                : detect_coding(view_.one_hop(), h, cands, policy);
        std::vector<std::size_t> out;
        for (std::size_t m : plan.members) out.push_back(index[m]);
        return out;
    }

    /**
     * Last chance for an expiring gratis packet: it may only join an encoding
     * that already pairs at least two natives, so it never takes a native's
     * coding opportunity away.
     */
    void expire_gratis(const QueuedEntry& gratis, SimTime now) {
        for (std::size_t h = 0; h < queue_.size(); ++h) {
            if (queue_[h].gratis) continue;
            const QueuedEntry head = queue_[h];
            const auto members = find_plan(head, GratisPolicy::AfterNatives, &gratis);
            if (std::find(members.begin(), members.end(), queue_.size()) == members.end()) continue;
            std::vector<QueuedEntry> plan{head};
            for (std::size_t i : members) plan.push_back(i == queue_.size() ? gratis : queue_[i]);
            transmit_plan(plan, now);
            return;
        }
        ++counters_.gratis_expired;
        ctx_->trace(id_, "expire-gratis", gratis.pid, "");
    }

    /// Records a copy heard from `from` without any relay decision.
    void note_copy(const ConstituentHeader& c, NodeId from, SimTime now) {
        if (PoolEntry* e = pool_.find(c.pid, now)) {
            e->add_hop(from, now, !c.gratis);
            e->last_touch = now;
        }
        if (cfg_->coding == CodingMode::ReceptionTable) table_.record_transmission(c.pid, from, view_, now);
        if (!c.gratis || !cfg_->gratis_receiving_rule) term_.on_overheard(c.pid, from, now);
    }

    void handle_constituent(const ConstituentHeader& c, const Payload& payload, NodeId from, SimTime now) {
        if (payload != make_payload(c.pid, payload.size())) ++counters_.payload_mismatches;

        const bool held = pool_.holds(c.pid, now);
        const bool looks_new = looks_new_to_detector(c.pid, now);
        const bool gratis_rule = c.gratis && cfg_->gratis_receiving_rule;
        const std::size_t before = gratis_rule ? term_.state_hash() : 0;
        record_copy(pool_, c.pid, from, payload, c.origin_time, now, !c.gratis);
        if (cfg_->coding == CodingMode::ReceptionTable) table_.record_transmission(c.pid, from, view_, now);
        if (!gratis_rule) term_.on_overheard(c.pid, from, now);

        if (c.pid.source == id_) return;
        if (looks_new && !accepted_.contains(c.pid)) {
            accepted_.insert(c.pid);
            ctx_->delivered(id_, c.pid, c.origin_time);
            ctx_->trace(id_, c.gratis ? "recv-gratis" : "recv", c.pid, std::to_string(from));
        }

        if (gratis_rule) {
            receive_gratis(c, held, now);
            if (term_.state_hash() != before) ++counters_.gratis_state_violations;
            return;
        }
        receive_native(c, now);
    }

    /**
     * Whether duplicate detection takes this copy as a new packet. Sequence
     * number based criteria can reject a packet never seen before; such a
     * packet is treated as a duplicate and never reaches the application.
     */
    [[nodiscard]] bool looks_new_to_detector(const PacketId& pid, SimTime now) const {
        if (term_.kind() == Termination::MU) return true;
        return term_.peek(pid, view_.one_hop(), now) == Verdict::RelayEligible;
    }

    /// Gratis copies never touch termination state: duplicates are recognized read-only.
    void receive_gratis(const ConstituentHeader& c, bool held, SimTime now) {
        if (held || gratis_seen_.contains(c.pid) || transmitted_.contains(c.pid) ||
            term_.peek(c.pid, view_.one_hop(), now) == Verdict::Drop)
            return;
        maybe_buffer_gratis(c.pid, now);
    }

    void maybe_buffer_gratis(const PacketId& pid, SimTime now) {
        if (!coding_enabled() || !cfg_->coded_redundancy) return;
        if (gratis_seen_.contains(pid) || queued(pid) != queue_.end()) return;
        const PoolEntry* e = pool_.find(pid, now);
        if (e == nullptr || !mark_gratis(receivers_of(*e, view_), view_.one_hop(), false)) return;
        gratis_seen_[pid] = now + cfg_->pool_lifetime;
        ++counters_.gratis_buffered;
        buffer(pid, true, now);
    }

    void receive_native(const ConstituentHeader& c, SimTime now) {
        auto q = queued(c.pid);
        const bool is_forwarder = !c.gratis && c.forwarders.contains(id_);
        if (q != queue_.end()) {
            // a pending native copy only learns the new hop
            if (!q->gratis) return;
            // a gratis copy waiting here is superseded when this node is elected for the native
            if (!is_forwarder) return;
        }
        if (transmitted_.contains(c.pid)) return;

        if (term_.check(c.pid, view_.one_hop(), now) == Verdict::Drop) {
            ++counters_.termination_drops;
            ctx_->trace(id_, "drop", c.pid, "");
            return;
        }
        if (!is_forwarder) {
            maybe_buffer_gratis(c.pid, now);
            return;
        }
        if (q != queue_.end()) queue_.erase(q);

        if (coding_enabled()) {
            const QueuedEntry head{c.pid, now, false, 0};
            const auto members = find_plan(head, GratisPolicy::AfterNatives);
            if (!members.empty()) {
                std::vector<QueuedEntry> plan{head};
                for (std::size_t i : members) plan.push_back(queue_[i]);
                transmit_plan(plan, now);
                return;
            }
        }
        buffer(c.pid, false, now);
    }

    [[nodiscard]] NodeSet forwarders_for(const PoolEntry& e) const {
        if (e.relay_hops.empty()) return elect_source_forwarders(view_);
        return elect_forwarders(view_, e.relay_hops, cfg_->pruning, e.first_hop);
    }

    /// Encodes and sends the given entries, electing forwarders for every native constituent.
    void transmit_plan(const std::vector<QueuedEntry>& plan, SimTime now) {
        for (const auto& p : plan) {
            auto it = std::find_if(queue_.begin(), queue_.end(),
                                   [&](const QueuedEntry& q) { return q.token == p.token && q.pid == p.pid; });
            if (it != queue_.end()) queue_.erase(it);
        }
        std::vector<EncodeItem> items;
        for (const auto& p : plan) {
            const PoolEntry* e = pool_.find(p.pid, now);
            if (e == nullptr) continue;
            items.push_back({e, p.gratis ? NodeSet{} : forwarders_for(*e), p.gratis});
        }
        if (items.empty()) return;
        if (items.size() == 1 && items.front().gratis) return;  // gratis is never sent alone

        send(encode(items, id_), now);
    }

    void send(Packet pkt, SimTime now) {
        ++counters_.data_tx;
        if (pkt.kind == PacketKind::Encoded) {
            ++counters_.encoded_tx;
            counters_.coded_constituents += pkt.constituents.size();
            if (pkt.has_gratis()) ++counters_.encoded_with_gratis;
        } else {
            ++counters_.native_tx;
        }
        std::string detail;
        for (const auto& c : pkt.constituents) {
            if (!detail.empty()) detail += ' ';
            detail += c.pid.to_string();
            if (c.gratis) detail += "(g)";
        }
        for (const auto& c : pkt.constituents) {
            pool_.touch(c.pid, now);
            if (cfg_->coding == CodingMode::ReceptionTable) table_.record_own(c.pid, view_, now);
            if (c.gratis) continue;
            if (!transmitted_.insert(c.pid).second) ++counters_.repeat_native_tx;
            term_.on_transmitted(c.pid, view_.one_hop(), now);
        }
        for (const auto& c : pkt.constituents) ctx_->trace(id_, "tx", c.pid, detail);
        ctx_->transmit(id_, std::move(pkt));
    }

    NodeId id_;
    const ScenarioConfig* cfg_;
    NodeContext* ctx_;
    NeighborView view_;
    TerminationState term_;
    PacketPool pool_;
    ReceptionTable table_;
    std::vector<QueuedEntry> queue_;  // ascending (deadline, token)
    std::unordered_map<PacketId, SimTime, PacketIdHash> gratis_seen_;
    std::unordered_set<PacketId, PacketIdHash> transmitted_;
    std::unordered_set<PacketId, PacketIdHash> accepted_;  // delivered to this node's application
    std::uint64_t next_sn_ = 0;
    std::uint64_t next_token_ = 1;
    NodeCounters counters_;
};

}  // namespace nobcr
