#include "bdmsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bdmsim {

namespace {

// TxEnd stages
constexpr int64_t kStageData = 0;     // data frame left the air, resolve it
constexpr int64_t kStageAckDone = 1;  // ACK completed, exchange over (target = station)
constexpr int64_t kStageRts = 2;      // RTS left the air

constexpr int64_t kSaturatedFlow = -1;  // PacketArrival aux for data sources

constexpr int kRtsBytes = 20;

[[noreturn]] void sim_bug(const char* what) {
    throw std::logic_error(std::string("simulator bug: ") + what);
}

DataRate rate_from_mbps(double mbps) {
    if (mbps == 1.0) return DataRate(0);
    if (mbps == 2.0) return DataRate(1);
    if (mbps == 5.5) return DataRate(2);
    if (mbps == 11.0) return DataRate(3);
    throw std::invalid_argument("fixed rate must be one of 1, 2, 5.5, 11 Mbps");
}

std::unique_ptr<RateController> make_controller(const ScenarioConfig& cfg) {
    switch (cfg.controller) {
        case ControllerKind::Bdm:
            return std::make_unique<BdmController>(
                BdmState{cfg.bdm_initial_rate_level, cfg.bdm_initial_free_level,
                         BdmOutcome::None},
                cfg.bdm_granularity);
        case ControllerKind::Fixed:
            return std::make_unique<FixedRateController>(rate_from_mbps(cfg.fixed_rate_mbps));
        case ControllerKind::Arf:
            return std::make_unique<ArfLadderController>(cfg.bdm_initial_rate_level,
                                                         cfg.bdm_granularity);
        case ControllerKind::Edca:
            return std::make_unique<FixedRateController>(DataRate(3));
    }
    sim_bug("unknown controller kind");
}

}  // namespace

void Simulation::Medium::set_busy(Microseconds t) {
    if (busy) sim_bug("medium already busy at transmission start");
    busy = true;
    busy_start = t;
}

void Simulation::Medium::set_idle(Microseconds t) {
    if (!busy) sim_bug("medium already idle");
    tick_busy += t - std::max(busy_start, tick_from);
    busy = false;
}

Microseconds Simulation::Medium::take_tick_busy(Microseconds t) {
    if (busy) {
        tick_busy += t - std::max(busy_start, tick_from);
    }
    Microseconds v = tick_busy;
    tick_busy = 0;
    tick_from = t;
    return v;
}

Simulation::Simulation(const ScenarioConfig& config)
    : cfg_(config),
      timing_(config.timing),
      channel_rng_(config.seed, uint32_t(1 + config.voice_calls + config.data_stations)),
      util_window_(config.util_window_us, config.util_tick_us),
      voice_flow_(config.voice_flow()) {
    cfg_.validate();
    duration_us_ = Microseconds(std::llround(cfg_.duration_s * 1e6));
    voice_payload_bytes_ = voice_mac_payload_bytes(voice_flow_);
    rts_airtime_us_ = frame_airtime_us(0, kRtsBytes, DataRate::from_bps(timing_.basic_rate_bps),
                                       timing_.phy_header_us);
    offered_calls_ = cfg_.voice_calls;

    log_.tick_us = cfg_.util_tick_us;

    const int total = 1 + cfg_.voice_calls + cfg_.data_stations;
    const bool edca = cfg_.controller == ControllerKind::Edca;
    const MacParams dcf{timing_.cw_min, timing_.cw_max, timing_.difs_us, timing_.retry_limit};
    const MacParams edca_voice{8, 16, timing_.sifs_us + 2 * timing_.slot_us, timing_.retry_limit};
    const MacParams edca_data{32, 1023, timing_.sifs_us + 3 * timing_.slot_us,
                              timing_.retry_limit};

    stations_.resize(size_t(total));
    for (int i = 0; i < total; ++i) {
        StationSim& st = stations_[size_t(i)];
        st.id = i;
        const bool is_data = i > cfg_.voice_calls;
        st.traffic_class = is_data ? FrameClass::BestEffortData : FrameClass::AdmittedVoice;
        st.mac = edca ? (is_data ? edca_data : edca_voice) : dcf;
        st.cw = st.mac.cw_min;
        st.controller = make_controller(cfg_);
        st.rng = RngStream(cfg_.seed, uint32_t(i));
        if (i == 0) {
            st.distance_m = 0.0;
            st.active = true;
        } else if (!is_data) {
            const size_t k = size_t(i - 1);
            st.distance_m = k < cfg_.distances.size() ? cfg_.distances[k] : cfg_.distance_m;
        } else {
            st.distance_m = cfg_.distance_m;
            st.active = true;
            st.fixed_payload_bytes = cfg_.data_frame_bytes;
            if (cfg_.data_rate_kbps > 0.0) {
                st.cbr_interarrival_us = Microseconds(
                    std::llround(8000.0 * cfg_.data_frame_bytes / cfg_.data_rate_kbps));
                if (st.cbr_interarrival_us < 1) st.cbr_interarrival_us = 1;
            } else {
                st.saturated = true;
            }
        }
    }

    engine_.set_handler([this](const Event& ev) { dispatch(ev); });

    for (int i = cfg_.voice_calls + 1; i < total; ++i)
        engine_.schedule(0, EventKind::PacketArrival, i, kSaturatedFlow);
    for (int k = 0; k < cfg_.voice_calls; ++k) {
        const Microseconds t = Microseconds(k) * cfg_.call_start_interval_us;
        if (t <= duration_us_) engine_.schedule(t, EventKind::PacketArrival, kBroadcastTarget, k);
    }
    if (cfg_.util_tick_us <= duration_us_)
        engine_.schedule(cfg_.util_tick_us, EventKind::WindowTick);
}

void Simulation::run_until_us(Microseconds t_abs) {
    engine_.run_until(std::min(t_abs, duration_us_));
}

void Simulation::run() {
    run_until_us(duration_us_);
    if (!finalized_) {
        if (last_tick_us_ < duration_us_)
            log_.tick_busy_us.push_back(medium_.take_tick_busy(duration_us_));
        log_.duration_us = duration_us_;
        finalized_ = true;
    }
}

MetricsReport Simulation::report() const {
    if (!finalized_) throw std::logic_error("Simulation::report: run() has not completed");
    MetricsReport rep = build_report(log_, cfg_.report_window_us,
                                     per_call_bandwidth_bps(voice_flow_),
                                     timing_.mac_header_bytes, cfg_.throughput_include_mac);
    rep.offered_calls = offered_calls_;
    rep.admitted_calls = admitted_calls_;
    rep.blocked_calls = blocked_calls_;
    rep.controller_label = cfg_.controller_id();
    rep.metadata.push_back("controller=" + cfg_.controller_id());
    rep.metadata.push_back("seed=" + std::to_string(cfg_.seed));
    rep.metadata.push_back("stations=" + std::to_string(cfg_.voice_calls));
    rep.metadata.push_back("data_stations=" + std::to_string(cfg_.data_stations));
    rep.metadata.push_back("codec=" + cfg_.codec.name);
    rep.metadata.push_back("ptime_ms=" + std::to_string(cfg_.ptime_ms));
    rep.metadata.push_back(std::string("header_mode=") +
                           (cfg_.header_mode == HeaderMode::Full ? "full" : "compressed"));
    if (cfg_.controller == ControllerKind::Edca)
        rep.metadata.push_back("edca_params=voice cw 8..16 aifs 2 slots, data cw 32..1023 aifs 3 slots, 11M");
    if (cfg_.controller == ControllerKind::Bdm)
        rep.metadata.push_back(std::string("bdm_granularity=") +
                               (cfg_.bdm_granularity == UpdateGranularity::PerAttempt ? "attempt"
                                                                                      : "chain"));
    if (cfg_.admission_target_pct > 0.0) {
        rep.metadata.push_back("admission_target_pct=" + std::to_string(cfg_.admission_target_pct));
        rep.metadata.push_back("admitted=" + std::to_string(admitted_calls_) + "/" +
                               std::to_string(offered_calls_));
    }
    if (rep.delay_frames > 0) {
        rep.metadata.push_back("mean_attempt_delay_ms=" +
                               std::to_string(double(rep.attempt_delay_sum_us) /
                                              (1000.0 * double(rep.delay_frames))));
    }
    return rep;
}

void Simulation::dispatch(const Event& ev) {
    switch (ev.kind) {
        case EventKind::PacketArrival:
            if (ev.target == kBroadcastTarget)
                on_call_start(int(ev.aux));
            else
                on_arrival(ev.target, ev.aux);
            break;
        case EventKind::MediumIdle:
            on_anchor();
            break;
        case EventKind::BackoffSlot:
            on_tick();
            break;
        case EventKind::TxEnd:
            on_tx_end(ev.target, ev.aux);
            break;
        case EventKind::AckTimeout:
            on_outcome_timeout(ev.target);
            break;
        case EventKind::WindowTick:
            on_window_tick();
            break;
    }
}

void Simulation::on_arrival(int station, int64_t aux) {
    StationSim& st = stations_[size_t(station)];
    const Microseconds now = engine_.now();
    PendingFrame f;
    f.src = st.id;
    f.enqueue_us = now;
    if (aux == kSaturatedFlow) {
        f.dst = 0;
        f.payload_bytes = st.fixed_payload_bytes;
        f.cls = FrameClass::BestEffortData;
        if (!st.saturated && now + st.cbr_interarrival_us <= duration_us_)
            engine_.schedule(now + st.cbr_interarrival_us, EventKind::PacketArrival, st.id,
                             kSaturatedFlow);
    } else {
        FlowState& fl = st.flows[size_t(aux)];
        f.dst = fl.peer;
        f.payload_bytes = fl.payload_bytes;
        f.cls = FrameClass::AdmittedVoice;
        const Microseconds next = fl.source.next_arrival_us(st.rng);
        if (next <= duration_us_)
            engine_.schedule(next, EventKind::PacketArrival, st.id, aux);
    }
    st.queue.push_back(f);
    if (st.phase == StationPhase::Idle) start_frame_access(st);
}

void Simulation::on_call_start(int call_index) {
    StationSim& sta = stations_[size_t(1 + call_index)];
    const Microseconds now = engine_.now();
    if (cfg_.admission_target_pct > 0.0) {
        const double est = per_call_airtime_estimate_pct();
        if (!admit_call(util_window_.free_pct(), cfg_.admission_target_pct, est)) {
            ++blocked_calls_;
            return;
        }
    }
    ++admitted_calls_;
    sta.active = true;

    const Microseconds ptime_us = Microseconds(cfg_.ptime_ms) * 1000;
    StationSim& ap = stations_[0];
    // arrival phases are randomized per flow so the packet grids of
    // concurrent calls do not line up
    const Microseconds up_phase = Microseconds(sta.rng.next_uniform(uint64_t(ptime_us)));
    sta.flows.push_back(
        FlowState{VoiceSource(voice_flow_, now + up_phase), voice_payload_bytes_, 0});
    Microseconds t_up = sta.flows.back().source.next_arrival_us(sta.rng);
    if (t_up <= duration_us_)
        engine_.schedule(t_up, EventKind::PacketArrival, sta.id,
                         int64_t(sta.flows.size() - 1));

    const Microseconds dn_phase = Microseconds(ap.rng.next_uniform(uint64_t(ptime_us)));
    ap.flows.push_back(
        FlowState{VoiceSource(voice_flow_, now + dn_phase), voice_payload_bytes_, sta.id});
    Microseconds t_dn = ap.flows.back().source.next_arrival_us(ap.rng);
    if (t_dn <= duration_us_)
        engine_.schedule(t_dn, EventKind::PacketArrival, 0, int64_t(ap.flows.size() - 1));
}

double Simulation::per_call_airtime_estimate_pct() const {
    const DataRate rate = stations_[0].controller->attempt_rate();
    const Microseconds exchange =
        frame_airtime_us(voice_payload_bytes_, timing_.mac_header_bytes, rate,
                         timing_.phy_header_us) +
        timing_.sifs_us + timing_.ack_us;
    const double pps = 1000.0 / double(cfg_.ptime_ms);
    return 100.0 * (2.0 * pps * double(exchange)) * cfg_.admission_margin / 1e6;
}

void Simulation::start_frame_access(StationSim& st) {
    if (st.queue.empty()) sim_bug("frame access with an empty queue");
    if (st.phase != StationPhase::Idle && st.phase != StationPhase::Deferred)
        sim_bug("frame access outside idle/deferred phase");
    const PendingFrame& f = st.queue.front();
    if (const BdmState* bdm = st.controller->bdm_state();
        bdm && !tx_gate_send(*bdm, util_window_.free_pct(), f.cls)) {
        st.phase = StationPhase::Deferred;
        return;
    }
    st.backoff_remaining = draw_backoff(st.cw, st.rng);
    join_contention(st);
}

void Simulation::join_contention(StationSim& st) {
    st.phase = StationPhase::Waiting;
    add_contender(st.id);
    if (!medium_.busy) st.eligible_from = engine_.now() + st.mac.aifs_us;
    reconcile_chain();
}

void Simulation::add_contender(int id) {
    auto it = std::lower_bound(contenders_.begin(), contenders_.end(), id);
    if (it != contenders_.end() && *it == id) sim_bug("station already contending");
    contenders_.insert(it, id);
}

void Simulation::remove_contender(int id) {
    auto it = std::lower_bound(contenders_.begin(), contenders_.end(), id);
    if (it == contenders_.end() || *it != id) sim_bug("station not contending");
    contenders_.erase(it);
}

void Simulation::reconcile_chain() {
    if (medium_.busy || contenders_.empty()) {
        if (chain_.anchor != 0) engine_.cancel(chain_.anchor);
        if (chain_.tick != 0) engine_.cancel(chain_.tick);
        chain_ = Chain{};
        return;
    }
    if (chain_.ticking) return;  // slot grid stays anchored until the medium busies
    Microseconds t = stations_[size_t(contenders_.front())].eligible_from;
    for (int id : contenders_)
        t = std::min(t, stations_[size_t(id)].eligible_from);
    if (chain_.anchor != 0) {
        if (chain_.anchor_time == t) return;
        engine_.cancel(chain_.anchor);
    }
    chain_.anchor = engine_.schedule(t, EventKind::MediumIdle);
    chain_.anchor_time = t;
}

void Simulation::on_anchor() {
    chain_.anchor = 0;
    chain_.ticking = true;
    const Microseconds now = engine_.now();
    slot_instant(now, false);
    if (!medium_.busy && !contenders_.empty()) {
        chain_.tick = engine_.schedule(now + timing_.slot_us, EventKind::BackoffSlot);
    } else {
        chain_.ticking = false;
    }
}

void Simulation::on_tick() {
    chain_.tick = 0;
    const Microseconds now = engine_.now();
    slot_instant(now, true);
    if (!medium_.busy && !contenders_.empty()) {
        chain_.tick = engine_.schedule(now + timing_.slot_us, EventKind::BackoffSlot);
    } else {
        chain_.ticking = false;
    }
}

void Simulation::slot_instant(Microseconds t, bool decrement) {
    if (decrement) {
        for (int id : contenders_) {
            StationSim& st = stations_[size_t(id)];
            if (st.eligible_from <= t - timing_.slot_us && st.backoff_remaining > 0)
                --st.backoff_remaining;
        }
    }
    std::vector<int> winners;
    for (int id : contenders_) {
        StationSim& st = stations_[size_t(id)];
        if (st.eligible_from <= t && st.backoff_remaining == 0) winners.push_back(id);
    }
    if (!winners.empty()) begin_exchange(t, winners);
}

Microseconds Simulation::data_airtime_us(const PendingFrame& frame, DataRate rate) const {
    return frame_airtime_us(frame.payload_bytes, timing_.mac_header_bytes, rate,
                            timing_.phy_header_us);
}

void Simulation::begin_exchange(Microseconds t, const std::vector<int>& winners) {
    if (exchange_) sim_bug("exchange already in flight");
    for (int id : winners) remove_contender(id);
    if (chain_.anchor != 0) engine_.cancel(chain_.anchor);
    if (chain_.tick != 0) engine_.cancel(chain_.tick);
    chain_ = Chain{};

    Exchange ex;
    ex.start_us = t;
    ex.members = winners;
    ex.rts_phase = cfg_.rts_cts;
    Microseconds max_end = t;
    for (int id : winners) {
        StationSim& st = stations_[size_t(id)];
        st.phase = StationPhase::Transmitting;
        PendingFrame& f = st.queue.front();
        if (f.first_attempt_us < 0) f.first_attempt_us = t;
        const DataRate rate = st.controller->attempt_rate();
        f.rate_level = rate.level();
        const Microseconds air = cfg_.rts_cts ? rts_airtime_us_ : data_airtime_us(f, rate);
        st.own_stage_end = t + air;
        st.outcome_timeout = engine_.schedule(
            st.own_stage_end + timing_.ack_timeout_after_data_us(), EventKind::AckTimeout, id);
        max_end = std::max(max_end, st.own_stage_end);
    }
    medium_.set_busy(t);
    exchange_ = std::move(ex);
    engine_.schedule(max_end, EventKind::TxEnd, kBroadcastTarget,
                     cfg_.rts_cts ? kStageRts : kStageData);
}

void Simulation::on_tx_end(int32_t target, int64_t stage) {
    const Microseconds now = engine_.now();

    if (stage == kStageAckDone) {
        StationSim& st = stations_[size_t(target)];
        medium_.set_idle(now);
        // waiting contenders restart their AIFS observation before the
        // finished transmitter can rejoin, so every eligibility is fresh
        medium_went_idle(now);
        complete_success(st, now);
        return;
    }

    if (!exchange_) sim_bug("transmission end without an exchange");
    Exchange ex = *exchange_;
    const int n = int(ex.members.size());

    if (stage == kStageRts) {
        if (n >= 2) {
            log_.resolutions.push_back({now, n, false});
            for (int id : ex.members) {
                StationSim& m = stations_[size_t(id)];
                // a member whose timeout already fired has moved on
                if (m.phase == StationPhase::Transmitting) m.phase = StationPhase::AwaitingOutcome;
            }
            exchange_.reset();
            medium_.set_idle(now);
            medium_went_idle(now);
            return;
        }
        // handshake succeeded; CTS then the data frame, medium held throughout
        StationSim& st = stations_[size_t(ex.members.front())];
        PendingFrame& f = st.queue.front();
        const Microseconds data_end = now + timing_.sifs_us + timing_.ack_us + timing_.sifs_us +
                                      data_airtime_us(f, DataRate(f.rate_level));
        st.own_stage_end = data_end;
        engine_.cancel(st.outcome_timeout);
        st.outcome_timeout = engine_.schedule(data_end + timing_.ack_timeout_after_data_us(),
                                              EventKind::AckTimeout, st.id);
        exchange_->rts_phase = false;
        engine_.schedule(data_end, EventKind::TxEnd, kBroadcastTarget, kStageData);
        return;
    }

    if (stage != kStageData) sim_bug("unknown transmission stage");

    if (n >= 2) {
        log_.resolutions.push_back({now, n, false});
        for (int id : ex.members) {
            StationSim& m = stations_[size_t(id)];
            if (m.phase == StationPhase::Transmitting) m.phase = StationPhase::AwaitingOutcome;
        }
        exchange_.reset();
        medium_.set_idle(now);
        medium_went_idle(now);
        return;
    }

    StationSim& st = stations_[size_t(ex.members.front())];
    const PendingFrame& f = st.queue.front();
    const double fer =
        frame_error_rate(f.payload_bytes, timing_.mac_header_bytes, DataRate(f.rate_level),
                         cfg_.ber);
    const ResolveResult result = resolve_transmission(1, fer, channel_rng_);
    const bool ok = result == ResolveResult::Delivered;
    log_.resolutions.push_back({now, 1, ok});
    exchange_.reset();
    if (ok) {
        engine_.cancel(st.outcome_timeout);
        st.outcome_timeout = 0;
        engine_.schedule(now + timing_.sifs_us + timing_.ack_us, EventKind::TxEnd, st.id,
                         kStageAckDone);
        // the medium stays busy through SIFS and the ACK
    } else {
        st.phase = StationPhase::AwaitingOutcome;
        medium_.set_idle(now);
        medium_went_idle(now);
    }
}

void Simulation::complete_success(StationSim& st, Microseconds t) {
    if (st.phase != StationPhase::Transmitting) sim_bug("success outside a transmission");
    PendingFrame f = st.queue.front();
    st.queue.pop_front();
    st.controller->on_attempt(TxOutcome::Success);
    st.controller->on_chain_complete(TxOutcome::Success);
    st.cw = advance_cw(st.cw, TxOutcome::Success, st.mac.cw_min, st.mac.cw_max);
    log_.records.push_back({st.id, f.enqueue_us, f.first_attempt_us, t, f.payload_bytes,
                            TxResult::Delivered, f.retry_count, f.rate_level});
    st.phase = StationPhase::Idle;
    refill_saturated(st, t);
    if (!st.queue.empty()) start_frame_access(st);
}

void Simulation::on_outcome_timeout(int station) {
    StationSim& st = stations_[size_t(station)];
    if (st.phase != StationPhase::Transmitting && st.phase != StationPhase::AwaitingOutcome)
        sim_bug("ACK timeout outside a transmission");
    st.outcome_timeout = 0;
    const Microseconds now = engine_.now();
    PendingFrame& f = st.queue.front();
    st.controller->on_attempt(TxOutcome::Failure);
    if (f.retry_count >= st.mac.retry_limit) {
        PendingFrame dropped = f;
        st.queue.pop_front();
        st.controller->on_chain_complete(TxOutcome::Failure);
        st.cw = st.mac.cw_min;  // window resets once the frame is abandoned
        log_.records.push_back({st.id, dropped.enqueue_us, dropped.first_attempt_us, now,
                                dropped.payload_bytes, TxResult::Dropped, dropped.retry_count,
                                dropped.rate_level});
        st.phase = StationPhase::Idle;
        refill_saturated(st, now);
        if (!st.queue.empty()) start_frame_access(st);
        return;
    }
    f.retry_count += 1;
    st.cw = advance_cw(st.cw, TxOutcome::Failure, st.mac.cw_min, st.mac.cw_max);
    st.backoff_remaining = draw_backoff(st.cw, st.rng);
    join_contention(st);
}

void Simulation::medium_went_idle(Microseconds t) {
    for (int id : contenders_) {
        StationSim& st = stations_[size_t(id)];
        st.eligible_from = t + st.mac.aifs_us;
    }
    reconcile_chain();
}

void Simulation::refill_saturated(StationSim& st, Microseconds t) {
    if (st.saturated && st.queue.empty()) {
        PendingFrame f;
        f.src = st.id;
        f.dst = 0;
        f.payload_bytes = st.fixed_payload_bytes;
        f.enqueue_us = t;
        f.cls = FrameClass::BestEffortData;
        st.queue.push_back(f);
    }
}

void Simulation::on_window_tick() {
    const Microseconds now = engine_.now();
    const Microseconds busy = medium_.take_tick_busy(now);
    util_window_.push_bucket(busy);
    log_.tick_busy_us.push_back(busy);
    last_tick_us_ = now;
    for (StationSim& st : stations_) {
        if (st.phase == StationPhase::Deferred && !st.queue.empty()) start_frame_access(st);
    }
    if (now + cfg_.util_tick_us <= duration_us_)
        engine_.schedule(now + cfg_.util_tick_us, EventKind::WindowTick);
}

}  // namespace bdmsim
