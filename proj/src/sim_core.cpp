#include "bdmsim/sim_core.hpp"

namespace bdmsim {

EventHandle EventEngine::schedule(Microseconds fire_at, EventKind kind,
                                  int32_t target, int64_t aux) {
    if (fire_at < now_)
        throw std::invalid_argument("EventEngine::schedule: fire_at precedes the current clock");
    Event e{fire_at, next_seq_++, kind, target, aux};
    queue_.push(e);
    return e.seq;
}

uint64_t EventEngine::run_until(Microseconds t_end) {
    if (t_end < now_)
        throw std::invalid_argument("EventEngine::run_until: t_end precedes the current clock");
    uint64_t processed = 0;
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        Event e = queue_.top();
        queue_.pop();
        if (auto it = cancelled_.find(e.seq); it != cancelled_.end()) {
            cancelled_.erase(it);
            continue;
        }
        now_ = e.fire_at;
        ++processed;
        if (handler_) handler_(e);
    }
    now_ = t_end;
    return processed;
}

}  // namespace bdmsim
