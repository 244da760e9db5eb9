#include "bdmsim/metrics.hpp"
#include "doctest.h"

using namespace bdmsim;

namespace {

TxRecord delivered(int station, Microseconds enqueue, Microseconds completion, int payload) {
    return {station, enqueue, enqueue, completion, payload, TxResult::Delivered, 0, 3};
}

TxRecord dropped_at(Microseconds t) {
    return {0, t, t, t + 100, 60, TxResult::Dropped, 7, 3};
}

}  // namespace

TEST_CASE("throughput counts delivered payload bits over the interval") {
    MetricsLog log;
    CHECK(throughput_bps(log, 1'000'000) == 0.0);
    for (int i = 0; i < 10; ++i)
        log.records.push_back(delivered(1, i * 1000, i * 1000 + 500, 100));
    CHECK(throughput_bps(log, 1'000'000) == 8'000.0);
    for (int i = 0; i < 10; ++i)
        log.records.push_back(delivered(1, i * 1000, i * 1000 + 700, 100));
    CHECK(throughput_bps(log, 1'000'000) == 16'000.0);
    CHECK_THROWS_AS(throughput_bps(log, 0), std::invalid_argument);
}

TEST_CASE("frame loss ratio") {
    MetricsLog log;
    CHECK_THROWS_AS(frame_loss_ratio(log), std::invalid_argument);
    for (int i = 0; i < 100; ++i) log.records.push_back(delivered(0, 0, 10, 60));
    CHECK(frame_loss_ratio(log) == 0.0);
    for (int i = 0; i < 100; ++i) log.records.push_back(dropped_at(20));
    CHECK(frame_loss_ratio(log) == 0.5);
    MetricsLog all_lost;
    for (int i = 0; i < 5; ++i) all_lost.records.push_back(dropped_at(20));
    CHECK(frame_loss_ratio(all_lost) == 1.0);
}

TEST_CASE("mean access delay in milliseconds") {
    MetricsLog log;
    CHECK_FALSE(mean_access_delay_ms(log).has_value());
    log.records.push_back(dropped_at(0));
    CHECK_FALSE(mean_access_delay_ms(log).has_value());
    log.records.push_back(delivered(0, 0, 5000, 60));
    CHECK(mean_access_delay_ms(log) == 5.0);
    log.records.push_back(delivered(0, 0, 4000, 60));
    log.records.push_back(delivered(0, 0, 6000, 60));
    CHECK(mean_access_delay_ms(log) == 5.0);
    const double before = *mean_access_delay_ms(log);
    log.records.push_back(delivered(0, 0, 50'000, 60));
    CHECK(*mean_access_delay_ms(log) > before);
}

TEST_CASE("utilization percentage") {
    CHECK(utilization_pct(875'000, 1'000'000) == 87.5);
    CHECK(utilization_pct(0, 1'000'000) == 0.0);
    CHECK(utilization_pct(1'000'000, 1'000'000) == 100.0);
    CHECK_THROWS_AS(utilization_pct(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(utilization_pct(1, 0), std::invalid_argument);
}

TEST_CASE("call capacity is the throughput per per-call rate") {
    CHECK(call_capacity(1'000'000.0, 110'000.0) == doctest::Approx(9.0909).epsilon(1e-3));
    CHECK(call_capacity(0.0, 24'000.0) == 0.0);
    CHECK(call_capacity(480'000.0, 48'000.0) == 2 * call_capacity(480'000.0, 96'000.0));
    CHECK_THROWS_AS(call_capacity(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("report windows partition the run") {
    MetricsLog log;
    log.duration_us = 3'500'000;
    log.tick_us = 100'000;
    for (int i = 0; i < 35; ++i) log.tick_busy_us.push_back(40'000);
    // one frame per 100 ms, including completions exactly on window boundaries
    for (int i = 1; i <= 35; ++i)
        log.records.push_back(delivered(1, (i - 1) * 100'000, i * 100'000, 60));
    log.records.push_back(dropped_at(1'234'000));

    const MetricsReport rep = build_report(log, 1'000'000, 24'000.0, 34, false);
    REQUIRE(rep.windows.size() == 4);
    CHECK(rep.windows[3].len_us == 500'000);

    int64_t window_bits = 0, window_delivered = 0, window_dropped = 0;
    Microseconds window_busy = 0;
    for (const auto& w : rep.windows) {
        window_bits += w.delivered_bits;
        window_delivered += w.delivered;
        window_dropped += w.dropped;
        window_busy += w.busy_us;
    }
    CHECK(window_bits == rep.delivered_bits);
    CHECK(window_bits == 35 * 480);
    CHECK(window_delivered == rep.delivered);
    CHECK(window_dropped == rep.dropped);
    CHECK(window_busy == rep.busy_us);
    CHECK(rep.busy_us == 35 * 40'000);
    CHECK(rep.windows[0].delivered == 10);  // completions at 0.1s..1.0s inclusive

    // MAC-overhead accounting adds the header bits per delivered frame
    const MetricsReport with_mac = build_report(log, 1'000'000, 24'000.0, 34, true);
    CHECK(with_mac.delivered_bits == rep.delivered_bits + 35 * 8 * 34);
}
