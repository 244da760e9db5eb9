#include "bdmsim/bdm.hpp"

#include <algorithm>
#include <stdexcept>

namespace bdmsim {

BdmState bdm_init() { return BdmState{0, kBdmFreeBwLevels - 1, BdmOutcome::None}; }

BdmState bdm_update(const BdmState& state, TxOutcome outcome) {
    if (state.rate_level < 0 || state.rate_level >= kBdmRateLevels ||
        state.free_bw_level < 0 || state.free_bw_level >= kBdmFreeBwLevels)
        throw std::invalid_argument("bdm_update: state out of range");
    BdmState next = state;
    if (outcome == TxOutcome::Success) {
        next.rate_level = std::min(state.rate_level + 1, kBdmRateLevels - 1);
        next.free_bw_level = std::max(state.free_bw_level - 1, 0);
        next.last_outcome = BdmOutcome::Success;
    } else {
        next.rate_level = std::max(state.rate_level - 1, 0);
        next.free_bw_level = std::min(state.free_bw_level + 1, kBdmFreeBwLevels - 1);
        next.last_outcome = BdmOutcome::Failure;
    }
    return next;
}

double target_free_pct(const BdmState& state) { return double(state.free_bw_level + 1); }

bool tx_gate_send(const BdmState& state, double measured_free_pct, FrameClass frame_class) {
    if (frame_class == FrameClass::AdmittedVoice) return true;
    return measured_free_pct >= target_free_pct(state);
}

bool admit_call(double measured_free_pct, double target_free_pct_value,
                double per_call_airtime_pct) {
    if (per_call_airtime_pct < 0.0)
        throw std::invalid_argument("admit_call: per-call airtime must be >= 0");
    return measured_free_pct - per_call_airtime_pct >= target_free_pct_value;
}

UtilizationWindow::UtilizationWindow(Microseconds window_us, Microseconds tick_us)
    : configured_window_us_(window_us), tick_us_(tick_us) {
    if (window_us <= 0 || tick_us <= 0 || window_us % tick_us != 0)
        throw std::invalid_argument("UtilizationWindow: window must be a positive multiple of the tick");
}

UtilizationWindow UtilizationWindow::from_sample(Microseconds window_us, Microseconds busy_us) {
    if (window_us <= 0) throw std::invalid_argument("UtilizationWindow: window must be positive");
    if (busy_us < 0 || busy_us > window_us)
        throw std::invalid_argument("UtilizationWindow: busy time exceeds the window");
    UtilizationWindow w(window_us, window_us);
    w.sample_window_us_ = window_us;
    w.busy_us_ = busy_us;
    return w;
}

void UtilizationWindow::push_bucket(Microseconds busy_us_in_tick) {
    if (busy_us_in_tick < 0 || busy_us_in_tick > tick_us_)
        throw std::invalid_argument("UtilizationWindow: tick busy time exceeds the tick");
    buckets_.push_back(busy_us_in_tick);
    busy_us_ += busy_us_in_tick;
    const size_t max_buckets = size_t(configured_window_us_ / tick_us_);
    while (buckets_.size() > max_buckets) {
        busy_us_ -= buckets_.front();
        buckets_.pop_front();
    }
}

Microseconds UtilizationWindow::window_us() const {
    if (sample_window_us_ > 0) return sample_window_us_;
    return Microseconds(buckets_.size()) * tick_us_;
}

int64_t UtilizationWindow::utilization_micropct() const {
    const Microseconds span = window_us();
    if (span == 0) return 0;
    // round-to-nearest in micro-percent; busy <= span keeps this in [0, 1e8]
    return (busy_us_ * 100'000'000 + span / 2) / span;
}

double measure_free_bandwidth(const UtilizationWindow& window) { return window.free_pct(); }

}  // namespace bdmsim
