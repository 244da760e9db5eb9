#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "bdmsim/controller.hpp"
#include "bdmsim/mac.hpp"
#include "bdmsim/metrics.hpp"
#include "bdmsim/scenario.hpp"
#include "bdmsim/sim_core.hpp"
#include "bdmsim/voip.hpp"

namespace bdmsim {

// Per-station access parameters; plain DCF everywhere except the EDCA
// baseline, which runs voice at CW 8..16 / AIFS 2 slots and data at
// CW 32..1023 / AIFS 3 slots.
struct MacParams {
    int cw_min = 32;
    int cw_max = 1023;
    Microseconds aifs_us = 50;
    int retry_limit = 7;
};

// A MAC PDU waiting in or at the head of a station queue.
struct PendingFrame {
    int src = 0;
    int dst = 0;
    int payload_bytes = 0;
    Microseconds enqueue_us = 0;
    Microseconds first_attempt_us = -1;
    int retry_count = 0;
    int rate_level = 0;
    FrameClass cls = FrameClass::AdmittedVoice;
};

enum class StationPhase : uint8_t { Idle, Waiting, Transmitting, AwaitingOutcome, Deferred };

// One 802.11b BSS on a single shared medium, every station in carrier-sense
// range of every other. Station 0 is the AP and carries the downlink half of
// each call under the same DCF rules. The whole instance is single-threaded
// and deterministic for a given (config, seed).
class Simulation {
public:
    explicit Simulation(const ScenarioConfig& config);

    // Runs to the configured duration and finalizes the log.
    void run();

    // Advances to an absolute simulation time (clamped to the duration);
    // usable incrementally before run().
    void run_until_us(Microseconds t_abs);

    Microseconds now() const { return engine_.now(); }
    const MetricsLog& log() const { return log_; }

    int offered_calls() const { return offered_calls_; }
    int admitted_calls() const { return admitted_calls_; }
    int blocked_calls() const { return blocked_calls_; }

    // Valid after run().
    MetricsReport report() const;

private:
    struct FlowState {
        VoiceSource source;
        int payload_bytes;
        int peer;
    };

    struct StationSim {
        int id = 0;
        double distance_m = 0.0;
        MacParams mac;
        FrameClass traffic_class = FrameClass::AdmittedVoice;
        std::deque<PendingFrame> queue;
        StationPhase phase = StationPhase::Idle;
        int cw = 32;
        int backoff_remaining = 0;
        Microseconds eligible_from = 0;
        bool saturated = false;
        int fixed_payload_bytes = 0;
        Microseconds cbr_interarrival_us = 0;
        std::unique_ptr<RateController> controller;
        RngStream rng;
        EventHandle outcome_timeout = 0;
        Microseconds own_stage_end = 0;
        std::vector<FlowState> flows;
        bool active = false;
    };

    struct Medium {
        bool busy = false;
        Microseconds busy_start = 0;
        Microseconds tick_busy = 0;
        Microseconds tick_from = 0;

        void set_busy(Microseconds t);
        void set_idle(Microseconds t);
        Microseconds take_tick_busy(Microseconds t);
    };

    struct Chain {
        EventHandle anchor = 0;
        Microseconds anchor_time = 0;
        bool ticking = false;
        EventHandle tick = 0;
        bool active() const { return anchor != 0 || ticking; }
    };

    struct Exchange {
        Microseconds start_us = 0;
        std::vector<int> members;
        bool rts_phase = false;
    };

    void dispatch(const Event& ev);
    void on_arrival(int station, int64_t aux);
    void on_call_start(int call_index);
    void on_anchor();
    void on_tick();
    void on_tx_end(int32_t target, int64_t stage);
    void on_outcome_timeout(int station);
    void on_window_tick();

    void start_frame_access(StationSim& st);
    void join_contention(StationSim& st);
    void reconcile_chain();
    void slot_instant(Microseconds t, bool decrement);
    void begin_exchange(Microseconds t, const std::vector<int>& winners);
    void complete_success(StationSim& st, Microseconds t);
    void medium_went_idle(Microseconds t);
    void refill_saturated(StationSim& st, Microseconds t);
    void add_contender(int id);
    void remove_contender(int id);
    double per_call_airtime_estimate_pct() const;
    Microseconds data_airtime_us(const PendingFrame& frame, DataRate rate) const;

    ScenarioConfig cfg_;
    MacTiming timing_;
    EventEngine engine_;
    Medium medium_;
    Chain chain_;
    std::optional<Exchange> exchange_;
    std::vector<StationSim> stations_;
    std::vector<int> contenders_;  // sorted station ids with a pending draw
    RngStream channel_rng_;
    UtilizationWindow util_window_;
    MetricsLog log_;
    Microseconds duration_us_ = 0;
    Microseconds last_tick_us_ = 0;
    Microseconds rts_airtime_us_ = 0;
    int voice_payload_bytes_ = 0;
    VoipFlow voice_flow_;
    int offered_calls_ = 0;
    int admitted_calls_ = 0;
    int blocked_calls_ = 0;
    bool finalized_ = false;
};

}  // namespace bdmsim
