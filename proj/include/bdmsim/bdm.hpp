#pragma once

#include <cstdint>
#include <deque>

#include "bdmsim/mac.hpp"
#include "bdmsim/sim_core.hpp"

namespace bdmsim {

enum class BdmOutcome : uint8_t { Success, Failure, None };

// BDM couples two ladders: the 802.11b data-rate levels (0..3, 1..11 Mbps)
// and a free-bandwidth target (level k reserves (k+1)% of channel time).
// A successful transmission climbs the rate ladder and relaxes the reserve;
// a failure backs the rate off and grows the reserve. Both ladders saturate
// at their ends.
struct BdmState {
    int rate_level = 0;
    int free_bw_level = 4;
    BdmOutcome last_outcome = BdmOutcome::None;

    friend bool operator==(const BdmState&, const BdmState&) = default;
};

inline constexpr int kBdmRateLevels = 4;
inline constexpr int kBdmFreeBwLevels = 5;

// Start at the lowest rate with the largest reserve: (rate 0, free-bw 4).
BdmState bdm_init();

BdmState bdm_update(const BdmState& state, TxOutcome outcome);

// Free-bandwidth target percentage for a state: level k -> (k+1)%.
double target_free_pct(const BdmState& state);

enum class FrameClass : uint8_t { AdmittedVoice, CallSetup, BestEffortData };

// Transmission gate: frames of already-admitted voice calls always go out;
// new-call setup and best-effort data are deferred whenever the measured
// free bandwidth sits below the state's target.
bool tx_gate_send(const BdmState& state, double measured_free_pct, FrameClass frame_class);

// Admit a call only if the free bandwidth left after it would still meet
// the target reserve.
bool admit_call(double measured_free_pct, double target_free_pct_value,
                double per_call_airtime_pct);

// Sliding busy-time monitor over the shared medium. Busy microseconds are
// pushed once per tick; the window keeps the most recent `window_us` worth
// of ticks (less while the run is younger than the window). Percentages are
// held in integer micro-percent so that utilization and free bandwidth sum
// to exactly 100 by construction.
class UtilizationWindow {
public:
    UtilizationWindow(Microseconds window_us, Microseconds tick_us);

    // Direct-sample construction for planning math: a window of `window_us`
    // of which `busy_us` were busy.
    static UtilizationWindow from_sample(Microseconds window_us, Microseconds busy_us);

    void push_bucket(Microseconds busy_us_in_tick);

    Microseconds window_us() const;  // effective span: min(configured, elapsed)
    Microseconds busy_us() const { return busy_us_; }

    int64_t utilization_micropct() const;
    int64_t free_micropct() const { return 100'000'000 - utilization_micropct(); }

    double utilization_pct() const { return double(utilization_micropct()) / 1e6; }
    double free_pct() const { return double(free_micropct()) / 1e6; }

private:
    Microseconds configured_window_us_;
    Microseconds tick_us_;
    std::deque<Microseconds> buckets_;
    Microseconds busy_us_ = 0;
    Microseconds sample_window_us_ = 0;  // from_sample mode
};

// Free bandwidth = 100 - utilization, both read from the same window.
double measure_free_bandwidth(const UtilizationWindow& window);

}  // namespace bdmsim
