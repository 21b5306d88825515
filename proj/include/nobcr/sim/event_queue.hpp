#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "nobcr/core/packet.hpp"

namespace nobcr {

/// Min-queue on (time, seq); seq is the insertion counter, so equal times pop in FIFO order.
template <typename Payload>
class EventQueue {
public:
    struct Event {
        SimTime time;
        std::uint64_t seq;
        Payload payload;
    };

    void push(SimTime time, Payload payload) { heap_.push(Event{time, next_seq_++, std::move(payload)}); }

    [[nodiscard]] bool empty() const { return heap_.empty(); }
    [[nodiscard]] const Event& top() const { return heap_.top(); }

    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

    [[nodiscard]] std::uint64_t pushed() const { return next_seq_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace nobcr
