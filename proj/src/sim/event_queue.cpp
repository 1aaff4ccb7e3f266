#include "specsim/sim/event_queue.hpp"

#include <string>

#include "specsim/errors.hpp"

namespace specsim {

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::RequestArrival: return "request_arrival";
        case EventKind::BatchReady: return "batch_ready";
        case EventKind::ComputeDone: return "compute_done";
        case EventKind::NetArrive: return "net_arrive";
        case EventKind::IterationStart: return "iteration_start";
    }
    return "?";
}

void SimKernel::schedule(SimTime t, EventKind kind, std::uint64_t a, std::uint64_t b) {
    if (t < now_) {
        throw SchedulingInPast("event at t=" + std::to_string(t) +
                               "us scheduled before clock " + std::to_string(now_) + "us");
    }
    heap_.push(Event{t, next_seq_++, kind, a, b});
}

SimTime SimKernel::run_until(SimTime end) {
    while (!heap_.empty() && heap_.top().time <= end) {
        Event ev = heap_.top();
        heap_.pop();
        // The schedule() precondition makes this impossible to trip; keep it
        // as a hard invariant on every pop.
        if (ev.time < now_) {
            throw SchedulingInPast("clock would move backwards");
        }
        now_ = ev.time;
        ++processed_;
        if (handler_) handler_(ev);
    }
    return now_;
}

}  // namespace specsim
