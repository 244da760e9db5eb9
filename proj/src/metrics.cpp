#include "bdmsim/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace bdmsim {

double throughput_bps(const MetricsLog& log, Microseconds interval_us) {
    if (interval_us <= 0) throw std::invalid_argument("throughput_bps: interval must be positive");
    int64_t bits = 0;
    for (const auto& r : log.records)
        if (r.outcome == TxResult::Delivered && r.completion_us <= interval_us)
            bits += 8LL * r.payload_bytes;
    return double(bits) * 1e6 / double(interval_us);
}

double frame_loss_ratio(const MetricsLog& log) {
    if (log.records.empty()) throw std::invalid_argument("frame_loss_ratio: empty log");
    int64_t dropped = 0;
    for (const auto& r : log.records)
        if (r.outcome == TxResult::Dropped) ++dropped;
    return double(dropped) / double(log.records.size());
}

std::optional<double> mean_access_delay_ms(const MetricsLog& log) {
    int64_t sum_us = 0, n = 0;
    for (const auto& r : log.records) {
        if (r.outcome != TxResult::Delivered) continue;
        sum_us += r.completion_us - r.enqueue_us;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return double(sum_us) / (1000.0 * double(n));
}

double utilization_pct(Microseconds busy_us, Microseconds interval_us) {
    if (interval_us <= 0) throw std::invalid_argument("utilization_pct: interval must be positive");
    if (busy_us < 0 || busy_us > interval_us)
        throw std::invalid_argument("utilization_pct: busy time exceeds the interval");
    return 100.0 * double(busy_us) / double(interval_us);
}

double call_capacity(double max_throughput_bps, double per_call_rate_bps) {
    if (!(per_call_rate_bps > 0.0))
        throw std::invalid_argument("call_capacity: per-call rate must be positive");
    if (max_throughput_bps < 0.0)
        throw std::invalid_argument("call_capacity: throughput must be >= 0");
    return max_throughput_bps / per_call_rate_bps;
}

double WindowRow::throughput_bps() const {
    if (len_us <= 0) return 0.0;
    return double(delivered_bits) * 1e6 / double(len_us);
}

int64_t WindowRow::utilization_micropct() const {
    if (len_us <= 0) return 0;
    return (busy_us * 100'000'000 + len_us / 2) / len_us;
}

double MetricsReport::summary_throughput_bps() const {
    if (duration_us <= 0) return 0.0;
    return double(delivered_bits) * 1e6 / double(duration_us);
}

double MetricsReport::loss_ratio() const {
    const int64_t total = delivered + dropped;
    return total == 0 ? 0.0 : double(dropped) / double(total);
}

std::optional<double> MetricsReport::mean_delay_ms() const {
    if (delay_frames == 0) return std::nullopt;
    return double(delay_sum_us) / (1000.0 * double(delay_frames));
}

int64_t MetricsReport::utilization_micropct() const {
    if (duration_us <= 0) return 0;
    return (busy_us * 100'000'000 + duration_us / 2) / duration_us;
}

double MetricsReport::max_window_throughput_bps() const {
    double best = 0.0;
    for (const auto& w : windows) best = std::max(best, w.throughput_bps());
    return best;
}

double MetricsReport::capacity_calls() const {
    if (!(per_call_bw_bps > 0.0)) return 0.0;
    return max_window_throughput_bps() / per_call_bw_bps;
}

MetricsReport build_report(const MetricsLog& log, Microseconds window_us,
                           double per_call_bw_bps, int mac_header_bytes,
                           bool include_mac_overhead) {
    if (window_us <= 0) throw std::invalid_argument("build_report: window must be positive");
    if (log.duration_us <= 0) throw std::invalid_argument("build_report: log has no duration");

    MetricsReport rep;
    rep.duration_us = log.duration_us;
    rep.per_call_bw_bps = per_call_bw_bps;

    const int64_t n_windows = (log.duration_us + window_us - 1) / window_us;
    rep.windows.resize(size_t(n_windows));
    for (int64_t i = 0; i < n_windows; ++i) {
        auto& w = rep.windows[size_t(i)];
        w.end_us = std::min((i + 1) * window_us, log.duration_us);
        w.len_us = w.end_us - i * window_us;
    }

    for (const auto& r : log.records) {
        // completions at a boundary belong to the window they close
        int64_t idx = std::min((std::max<Microseconds>(r.completion_us, 1) - 1) / window_us,
                               n_windows - 1);
        auto& w = rep.windows[size_t(idx)];
        if (r.outcome == TxResult::Delivered) {
            if (r.completion_us < r.enqueue_us || r.first_attempt_us < r.enqueue_us)
                throw std::logic_error("build_report: record times out of order");
            int64_t bits = 8LL * r.payload_bytes;
            if (include_mac_overhead) bits += 8LL * mac_header_bytes;
            w.delivered_bits += bits;
            w.delivered += 1;
            w.delay_sum_us += r.completion_us - r.enqueue_us;
            w.delay_frames += 1;
            rep.delivered_bits += bits;
            rep.delivered += 1;
            rep.delay_sum_us += r.completion_us - r.enqueue_us;
            rep.attempt_delay_sum_us += r.completion_us - r.first_attempt_us;
            rep.delay_frames += 1;
        } else {
            w.dropped += 1;
            rep.dropped += 1;
        }
    }

    // busy time folds per tick into the window the tick ends in
    Microseconds t = 0;
    for (Microseconds busy : log.tick_busy_us) {
        const Microseconds tick_end = std::min(t + log.tick_us, log.duration_us);
        int64_t idx = std::min((std::max<Microseconds>(tick_end, 1) - 1) / window_us,
                               n_windows - 1);
        rep.windows[size_t(idx)].busy_us += busy;
        rep.busy_us += busy;
        t = tick_end;
    }

    return rep;
}

}  // namespace bdmsim
