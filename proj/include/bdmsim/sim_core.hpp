#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace bdmsim {

// All simulation time is kept in integer microseconds. Sub-microsecond
// quantities (bit times) are accumulated exactly and rounded up to whole
// microseconds at the point an event is scheduled, so airtime is never
// undercounted and runs replay bit-identically everywhere.
using Microseconds = int64_t;

inline constexpr int32_t kBroadcastTarget = -1;

enum class EventKind : uint8_t {
    MediumIdle,     // contention anchor: AIFS elapsed on an idle medium
    BackoffSlot,    // one backoff slot boundary for all counting stations
    TxEnd,          // end of an on-air stage (aux selects the stage)
    AckTimeout,     // no ACK arrived for the last attempt
    PacketArrival,  // a traffic source emits a frame; broadcast target = call setup
    WindowTick,     // utilization / reporting tick
};

struct Event {
    Microseconds fire_at = 0;
    uint64_t seq = 0;  // insertion counter; breaks fire_at ties
    EventKind kind = EventKind::WindowTick;
    int32_t target = kBroadcastTarget;
    int64_t aux = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

using EventHandle = uint64_t;

// Deterministic discrete-event core: a virtual microsecond clock plus a
// (fire_at, seq)-ordered queue. The pop order is a total order, so two runs
// with the same schedule calls dispatch identically. Strictly
// single-threaded; instances are self-contained and movable between threads.
class EventEngine {
public:
    using Handler = std::function<void(const Event&)>;

    Microseconds now() const { return now_; }

    void set_handler(Handler h) { handler_ = std::move(h); }

    // Enqueues an event. fire_at earlier than the current clock is a
    // causality violation and is rejected.
    EventHandle schedule(Microseconds fire_at, EventKind kind,
                         int32_t target = kBroadcastTarget, int64_t aux = 0);

    // Lazily cancels a scheduled event; cancelled events are skipped on pop
    // and do not count as processed.
    void cancel(EventHandle h) {
        if (h != 0) cancelled_.insert(h);
    }

    // Processes every event with fire_at <= t_end in order, then advances
    // the clock to exactly t_end. Returns the number of events dispatched.
    uint64_t run_until(Microseconds t_end);

    bool pending() const { return queue_.size() > cancelled_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    Microseconds now_ = 0;
    uint64_t next_seq_ = 1;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<uint64_t> cancelled_;
    Handler handler_;
};

}  // namespace bdmsim
