#include <cmath>

#include "bdmsim/rng.hpp"
#include "bdmsim/voip.hpp"
#include "doctest.h"

using namespace bdmsim;

TEST_CASE("codec profiles carry the standard media rates") {
    CHECK(CodecProfile::g711().media_bps == 64'000);
    CHECK(CodecProfile::g711().bytes_per_second() == 8'000);
    CHECK(CodecProfile::g729().media_bps == 8'000);
    CHECK(CodecProfile::g729().bytes_per_second() == 1'000);
    CHECK(CodecProfile::by_name("G.711")->media_bps == 64'000);
    CHECK_FALSE(CodecProfile::by_name("gsm").has_value());
}

TEST_CASE("packet payload follows bytes-per-second times ptime") {
    CHECK(packet_payload_bytes(CodecProfile::g729(), 20) == 20);
    CHECK(packet_payload_bytes(CodecProfile::g711(), 20) == 160);
    CHECK(packet_payload_bytes(CodecProfile::g711(), 0) == 0);
    const CodecProfile g723{"g723", 5'300};
    CHECK_THROWS_AS(packet_payload_bytes(g723, 20), std::invalid_argument);
    CHECK_THROWS_AS(packet_payload_bytes(CodecProfile::g729(), -1), std::invalid_argument);
}

TEST_CASE("header overhead: 40 bytes at 50 packets per second is 16 kbps") {
    CHECK(header_overhead_bps(20, HeaderMode::Full) == 16'000.0);
    CHECK(header_overhead_bps(20, HeaderMode::Compressed) == 800.0);
    CHECK(header_overhead_bps(40, HeaderMode::Full) == 8'000.0);
    CHECK_THROWS_AS(header_overhead_bps(0, HeaderMode::Full), std::invalid_argument);

    HeaderStack full{HeaderMode::Full};
    CHECK(full.bytes() == 40);
    CHECK(full.bits() == 320);
    CHECK(HeaderStack{HeaderMode::Compressed}.bytes() == 2);
}

TEST_CASE("per-call bandwidth: media plus headers") {
    VoipFlow flow;  // g729, 20 ms, full
    CHECK(per_call_bandwidth_bps(flow) == 24'000.0);
    flow.codec = CodecProfile::g711();
    CHECK(per_call_bandwidth_bps(flow) == 80'000.0);
    flow.codec = CodecProfile::g729();
    flow.header.mode = HeaderMode::Compressed;
    CHECK(per_call_bandwidth_bps(flow) == 8'800.0);

    CHECK(voice_mac_payload_bytes(VoipFlow{}) == 60);  // 20 B voice + 40 B headers
}

TEST_CASE("compressed headers always beat full headers") {
    for (const auto& codec : {CodecProfile::g711(), CodecProfile::g729()}) {
        for (int ptime : {10, 20, 40, 50, 100}) {
            VoipFlow full{codec, ptime, HeaderStack{HeaderMode::Full}};
            VoipFlow comp{codec, ptime, HeaderStack{HeaderMode::Compressed}};
            CHECK(per_call_bandwidth_bps(comp) < per_call_bandwidth_bps(full));
        }
    }
}

TEST_CASE("longer packets never cost more bandwidth") {
    for (const auto& codec : {CodecProfile::g711(), CodecProfile::g729()}) {
        double prev = per_call_bandwidth_bps(VoipFlow{codec, 10, HeaderStack{}});
        for (int ptime : {20, 25, 40, 50, 100}) {
            double bw = per_call_bandwidth_bps(VoipFlow{codec, ptime, HeaderStack{}});
            CHECK(bw <= prev);
            prev = bw;
        }
    }
}

TEST_CASE("spare-bandwidth call count") {
    CHECK(number_of_calls({1.0, 5e6, 5e6, 24'000.0}) == 0);
    CHECK(number_of_calls({0.7, 6e6, 1.2e6, 24'000.0}) == 140);
    CHECK(number_of_calls({1.0, 24'000.0, 0.0, 24'000.0}) == 1);
    CHECK(calls_ratio({0.7, 6e6, 1.2e6, 24'000.0}) == doctest::Approx(140.0));
    CHECK_THROWS_AS(number_of_calls({0.7, 6e6, 1.2e6, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(number_of_calls({0.0, 6e6, 1.2e6, 24'000.0}), std::invalid_argument);
    CHECK_THROWS_AS(number_of_calls({0.7, 1e6, 2e6, 24'000.0}), std::invalid_argument);

    // more spare bandwidth never reduces the count; a dearer codec never raises it
    int64_t prev = -1;
    for (double rb = 1e6; rb <= 8e6; rb += 5e5) {
        int64_t n = number_of_calls({0.7, rb, 1e6, 24'000.0});
        CHECK(n >= prev);
        prev = n;
    }
    prev = number_of_calls({0.7, 6e6, 1.2e6, 8'000.0}) + 1;
    for (double codec_bw : {8'000.0, 24'000.0, 80'000.0, 90'000.0}) {
        int64_t n = number_of_calls({0.7, 6e6, 1.2e6, codec_bw});
        CHECK(n < prev || n == 0);
        prev = n;
    }
}

TEST_CASE("Erlang-B: exact anchors and monotone shape") {
    CHECK(erlang_b(0, 2.0) == 1.0);
    CHECK(erlang_b(0, 0.0) == 1.0);
    CHECK(erlang_b(2, 2.0) == 0.4);
    CHECK(erlang_b(1, 1.0) == 0.5);
    CHECK(erlang_b(10, 0.0) == 0.0);
    CHECK_THROWS_AS(erlang_b(-1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(erlang_b(1, -0.5), std::invalid_argument);

    for (double a : {0.5, 2.0, 10.0, 25.0}) {
        double prev = 1.0;
        for (int n = 1; n <= 40; ++n) {
            double b = erlang_b(n, a);
            CHECK(b >= 0.0);
            CHECK(b <= 1.0);
            CHECK(b <= prev);
            prev = b;
        }
    }
    for (int n : {1, 4, 16}) {
        double prev = 0.0;
        for (double a = 0.5; a <= 30.0; a += 0.5) {
            double b = erlang_b(n, a);
            CHECK(b >= prev);
            prev = b;
        }
    }
}

TEST_CASE("always-on sources emit on the exact ptime grid") {
    VoipFlow flow;  // 20 ms
    VoiceSource src(flow, 1'000);
    RngStream rng(1, 0);
    for (int k = 0; k < 200; ++k)
        CHECK(src.next_arrival_us(rng) == 1'000 + 20'000 * Microseconds(k));
}

TEST_CASE("on/off sources hit the configured activity fraction over a long run") {
    VoipFlow flow;
    flow.talkspurt_on_off = true;
    flow.mean_talkspurt_s = 1.0;
    flow.mean_silence_s = 1.5;  // 40% on
    VoiceSource src(flow, 0);
    RngStream rng(11, 2);
    const Microseconds horizon = 10'000 * 1'000'000LL;  // 1e4 seconds
    int64_t packets = 0;
    while (src.next_arrival_us(rng) < horizon) ++packets;
    const double expected = 0.4 * 50.0 * 10'000.0;
    CHECK(double(packets) > expected * 0.95);
    CHECK(double(packets) < expected * 1.05);
}
