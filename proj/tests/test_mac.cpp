#include <cmath>

#include "bdmsim/mac.hpp"
#include "doctest.h"

using namespace bdmsim;

TEST_CASE("default timing matches the 802.11b parameter set") {
    MacTiming t;
    CHECK(t.difs_us == 50);
    CHECK(t.sifs_us == 10);
    CHECK(t.slot_us == 20);
    CHECK(t.cw_min == 32);
    CHECK(t.cw_max == 1023);
    CHECK(t.phy_header_us == 192);
    CHECK(t.mac_header_bytes == 34);
    CHECK(t.ack_us == 248);
    CHECK(t.basic_rate_bps == 1'000'000);
    CHECK_NOTHROW(t.validate());

    MacTiming bad = t;
    bad.sifs_us = 60;  // sifs must stay below difs
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = t;
    bad.cw_min = 2048;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("rate ladder levels map to the four 802.11b rates") {
    CHECK(DataRate(0).bps() == 1'000'000);
    CHECK(DataRate(1).bps() == 2'000'000);
    CHECK(DataRate(2).bps() == 5'500'000);
    CHECK(DataRate(3).bps() == 11'000'000);
    CHECK_THROWS_AS(DataRate(4), std::invalid_argument);
    CHECK(DataRate::from_bps(5'500'000).level() == 2);
    CHECK_THROWS_AS(DataRate::from_bps(54'000'000), std::invalid_argument);
}

TEST_CASE("frame airtime composes the PHY header with serialized bytes") {
    CHECK(frame_airtime_us(0, 34, DataRate(3)) == 217);   // 192 + ceil(272/11)
    CHECK(frame_airtime_us(60, 34, DataRate(0)) == 944);  // 192 + 752
    // doubling the payload strictly increases airtime at every rate
    for (int level = 0; level < DataRate::kLevels; ++level)
        for (int payload = 1; payload <= 1024; payload *= 2)
            CHECK(frame_airtime_us(2 * payload, 34, DataRate(level)) >
                  frame_airtime_us(payload, 34, DataRate(level)));
}

TEST_CASE("backoff draws are uniform over the contention window") {
    RngStream rng(3, 0);
    CHECK_THROWS_AS(draw_backoff(0, rng), std::invalid_argument);
    for (int i = 0; i < 1000; ++i) CHECK(draw_backoff(1, rng) == 0);
    double sum = 0.0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) {
        int v = draw_backoff(32, rng);
        CHECK(v >= 0);
        CHECK(v < 32);
        sum += v;
    }
    const double mean = sum / n;
    CHECK(mean > 15.5 * 0.98);
    CHECK(mean < 15.5 * 1.02);
}

TEST_CASE("contention window doubles on failure and resets on success") {
    CHECK(advance_cw(32, TxOutcome::Failure, 32, 1023) == 64);
    CHECK(advance_cw(1023, TxOutcome::Failure, 32, 1023) == 1023);
    CHECK(advance_cw(512, TxOutcome::Success, 32, 1023) == 32);

    int cw = 32;
    for (int k = 1; k <= 10; ++k) {
        cw = advance_cw(cw, TxOutcome::Failure, 32, 1023);
        CHECK(cw == std::min(32 << k, 1023));
        CHECK(cw >= 32);
        CHECK(cw <= 1023);
    }
    CHECK_THROWS_AS(advance_cw(7, TxOutcome::Failure, 32, 1023), std::invalid_argument);
}

TEST_CASE("frame error rate grows with size and matches both evaluation routes") {
    BerTable clean{};
    clean.ber = {0.0, 0.0, 0.0, 0.0};
    CHECK(frame_error_rate(60, 34, DataRate(3), clean) == 0.0);
    CHECK(frame_error_rate(2000, 34, DataRate(0), clean) == 0.0);

    BerTable table{};
    table.ber = {1e-5, 1e-5, 1e-5, 1e-5};
    // 94 bytes (60 + 34) at ber 1e-5: direct power form as the cross-check
    const double via_pow = 1.0 - std::pow(1.0 - 1e-5, 8.0 * 94.0);
    const double fer = frame_error_rate(60, 34, DataRate(3), table);
    CHECK(fer == doctest::Approx(0.00749).epsilon(2e-3));
    CHECK(fer == doctest::Approx(via_pow).epsilon(1e-9));

    for (int payload = 10; payload < 1500; payload += 97)
        CHECK(frame_error_rate(payload + 1, 34, DataRate(2), table) >
              frame_error_rate(payload, 34, DataRate(2), table));

    BerTable bad{};
    bad.ber = {0.0, 0.0, 0.0, 1.5};
    CHECK_THROWS_AS(frame_error_rate(60, 34, DataRate(3), bad), std::invalid_argument);
}

TEST_CASE("distance lookup selects the fastest covering row") {
    CHECK(rate_for_distance_bps(30.0, CoverageProfile::Dot11b) == 11'000'000);
    CHECK(rate_for_distance_bps(48.0, CoverageProfile::Dot11b) == 11'000'000);
    CHECK_FALSE(rate_for_distance_bps(48.5, CoverageProfile::Dot11b).has_value());
    CHECK(rate_for_distance_bps(28.0, CoverageProfile::Mixed) == 48'000'000);
    CHECK(rate_for_distance_bps(10.0, CoverageProfile::Mixed) == 54'000'000);
    CHECK(rate_for_distance_bps(45.0, CoverageProfile::Mixed) == 18'000'000);
    CHECK_FALSE(rate_for_distance_bps(100.0, CoverageProfile::Mixed).has_value());
    CHECK_THROWS_AS(rate_for_distance_bps(-1.0, CoverageProfile::Dot11b), std::invalid_argument);
}

TEST_CASE("transmission resolution: collisions always fail, lone senders face the channel") {
    RngStream rng(5, 0);
    CHECK(resolve_transmission(2, 0.0, rng) == ResolveResult::Collision);
    CHECK(resolve_transmission(5, 0.0, rng) == ResolveResult::Collision);
    CHECK(resolve_transmission(1, 0.0, rng) == ResolveResult::Delivered);
    CHECK(resolve_transmission(1, 1.0, rng) == ResolveResult::ChannelError);
    CHECK_THROWS_AS(resolve_transmission(0, 0.0, rng), std::invalid_argument);
}
