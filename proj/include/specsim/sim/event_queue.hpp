#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "specsim/sim/time.hpp"

namespace specsim {

enum class EventKind : std::uint8_t {
    RequestArrival,
    BatchReady,
    ComputeDone,
    NetArrive,
    IterationStart,
};

const char* event_kind_name(EventKind k);

struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;  // insertion order, breaks equal-time ties
    EventKind kind = EventKind::RequestArrival;
    // Payload identifiers; meaning depends on kind (request id, server id,
    // message index, batch token). Opaque to the kernel.
    std::uint64_t a = 0;
    std::uint64_t b = 0;
};

// Deterministic discrete-event kernel: virtual clock plus a priority queue
// ordered by (time, seq). Single-threaded; one instance per simulation.
class SimKernel {
public:
    using Handler = std::function<void(const Event&)>;

    SimTime now() const { return now_; }
    std::size_t pending() const { return heap_.size(); }

    void set_handler(Handler h) { handler_ = std::move(h); }

    // Throws SchedulingInPast if t < now().
    void schedule(SimTime t, EventKind kind, std::uint64_t a = 0, std::uint64_t b = 0);

    // Processes events with time <= end in (time, seq) order. Returns the
    // final clock value; an empty queue terminates without advancing it.
    SimTime run_until(SimTime end = kSimTimeMax);

    std::uint64_t events_processed() const { return processed_; }

private:
    struct Later {
        bool operator()(const Event& x, const Event& y) const {
            if (x.time != y.time) return x.time > y.time;
            return x.seq > y.seq;
        }
    };

    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    Handler handler_;
};

}  // namespace specsim
