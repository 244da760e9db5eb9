#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdmsim/sim_core.hpp"

namespace bdmsim {

enum class TxResult : uint8_t { Delivered, Dropped };

// One completed MAC transmission chain: a frame either delivered (ACK seen)
// or dropped after exhausting the retry limit.
struct TxRecord {
    int station = 0;
    Microseconds enqueue_us = 0;
    Microseconds first_attempt_us = 0;
    Microseconds completion_us = 0;
    int payload_bytes = 0;
    TxResult outcome = TxResult::Delivered;
    int retries = 0;
    int rate_level = 0;

    friend bool operator==(const TxRecord&, const TxRecord&) = default;
};

// One medium occupancy and how it ended; transmitters >= 2 is a collision.
struct ResolutionRecord {
    Microseconds time_us = 0;
    int transmitters = 0;
    bool success = false;

    friend bool operator==(const ResolutionRecord&, const ResolutionRecord&) = default;
};

struct MetricsLog {
    std::vector<TxRecord> records;
    std::vector<ResolutionRecord> resolutions;
    std::vector<Microseconds> tick_busy_us;  // channel busy time per tick
    Microseconds tick_us = 100'000;
    Microseconds duration_us = 0;

    friend bool operator==(const MetricsLog&, const MetricsLog&) = default;
};

// Delivered payload bits per second over the interval.
double throughput_bps(const MetricsLog& log, Microseconds interval_us);

// dropped / (dropped + delivered); rejects an empty log.
double frame_loss_ratio(const MetricsLog& log);

// Mean enqueue-to-completion time of delivered frames, in milliseconds;
// empty when nothing was delivered.
std::optional<double> mean_access_delay_ms(const MetricsLog& log);

double utilization_pct(Microseconds busy_us, Microseconds interval_us);

// Un-floored call count supported by a measured throughput; admission math
// floors separately.
double call_capacity(double max_throughput_bps, double per_call_rate_bps);

// Per-window slice of the run. Percentages are integer micro-percent so the
// utilization and free columns always sum to exactly 100.
struct WindowRow {
    Microseconds end_us = 0;
    Microseconds len_us = 0;
    int64_t delivered_bits = 0;
    int64_t delivered = 0;
    int64_t dropped = 0;
    Microseconds busy_us = 0;
    Microseconds delay_sum_us = 0;
    int64_t delay_frames = 0;

    double throughput_bps() const;
    int64_t utilization_micropct() const;

    friend bool operator==(const WindowRow&, const WindowRow&) = default;
};

struct MetricsReport {
    std::vector<WindowRow> windows;
    Microseconds duration_us = 0;
    int64_t delivered_bits = 0;
    int64_t delivered = 0;
    int64_t dropped = 0;
    Microseconds delay_sum_us = 0;
    int64_t delay_frames = 0;
    Microseconds attempt_delay_sum_us = 0;  // first-attempt-to-completion variant
    Microseconds busy_us = 0;
    double per_call_bw_bps = 0.0;
    int offered_calls = 0;
    int admitted_calls = 0;
    int blocked_calls = 0;
    std::string controller_label;
    std::vector<std::string> metadata;  // key=value lines echoed with the summary

    double summary_throughput_bps() const;
    double loss_ratio() const;
    std::optional<double> mean_delay_ms() const;
    int64_t utilization_micropct() const;
    double utilization() const { return double(utilization_micropct()) / 1e6; }
    double free_bw_pct() const { return double(100'000'000 - utilization_micropct()) / 1e6; }
    double max_window_throughput_bps() const;
    double capacity_calls() const;
};

// Builds the report: tumbling windows of `window_us` partition [0, duration],
// records land in the window containing their completion time. When
// `include_mac_overhead` is set, delivered MAC header bytes count toward
// throughput as well (airtime-style accounting for utilization cross-checks).
MetricsReport build_report(const MetricsLog& log, Microseconds window_us,
                           double per_call_bw_bps, int mac_header_bytes,
                           bool include_mac_overhead);

}  // namespace bdmsim
