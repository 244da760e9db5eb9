#include <algorithm>

#include "bdmsim/rng.hpp"
#include "bdmsim/scenario.hpp"
#include "bdmsim/simulation.hpp"
#include "doctest.h"

using namespace bdmsim;

namespace {

// saturated 60-byte senders on a clean channel at a fixed rate
ScenarioConfig saturated_config(int n_data, double rate_mbps, uint64_t seed) {
    ScenarioConfig cfg;
    cfg.voice_calls = 0;
    cfg.data_stations = n_data;
    cfg.data_frame_bytes = 60;
    cfg.controller = ControllerKind::Fixed;
    cfg.fixed_rate_mbps = rate_mbps;
    cfg.ber.ber = {0.0, 0.0, 0.0, 0.0};
    cfg.duration_s = 2.0;
    cfg.seed = seed;
    return cfg;
}

uint64_t find_seed(int want_first, int relation) {
    // relation: 0 -> d1 == want_first; 1 -> d1 != d2; 2 -> d1 == d2
    for (uint64_t s = 1; s < 100'000; ++s) {
        int d1 = int(RngStream(s, 1).next_uniform(32));
        if (relation == 0 && d1 == want_first) return s;
        if (relation > 0) {
            int d2 = int(RngStream(s, 2).next_uniform(32));
            if (relation == 1 && d1 != d2) return s;
            if (relation == 2 && d1 == d2) return s;
        }
    }
    REQUIRE(false);
    return 0;
}

constexpr Microseconds kAir60At11M = 261;  // 192 + ceil(752/11)

}  // namespace

TEST_CASE("a lone sender transmits after DIFS plus its drawn backoff") {
    const uint64_t seed = 77;
    Simulation sim(saturated_config(1, 11.0, seed));
    sim.run_until_us(3'000);
    const int d = int(RngStream(seed, 1).next_uniform(32));
    REQUIRE_FALSE(sim.log().resolutions.empty());
    const auto& r = sim.log().resolutions.front();
    CHECK(r.time_us == 50 + 20 * d + kAir60At11M);
    CHECK(r.transmitters == 1);
    CHECK(r.success);
}

TEST_CASE("a zero draw transmits exactly DIFS after the idle period begins") {
    const uint64_t seed = find_seed(0, 0);
    Simulation sim(saturated_config(1, 11.0, seed));
    sim.run_until_us(1'000);
    REQUIRE_FALSE(sim.log().resolutions.empty());
    CHECK(sim.log().resolutions.front().time_us == 50 + kAir60At11M);
}

TEST_CASE("the loser suspends its countdown and resumes with the remainder") {
    const uint64_t seed = find_seed(0, 1);
    const int d1 = int(RngStream(seed, 1).next_uniform(32));
    const int d2 = int(RngStream(seed, 2).next_uniform(32));
    REQUIRE(d1 != d2);
    const int dmin = std::min(d1, d2), dmax = std::max(d1, d2);
    const uint32_t winner = d1 < d2 ? 1 : 2;

    Simulation sim(saturated_config(2, 11.0, seed));
    sim.run_until_us(30'000);
    const auto& res = sim.log().resolutions;
    REQUIRE(res.size() >= 2);

    const Microseconds t0 = 50 + 20 * dmin;
    CHECK(res[0].time_us == t0 + kAir60At11M);
    CHECK(res[0].transmitters == 1);
    CHECK(res[0].success);

    // after the ACK the loser resumes with dmax - dmin slots left while the
    // winner contends afresh with its second draw
    const Microseconds ack_end = res[0].time_us + 10 + 248;
    RngStream winner_stream(seed, winner);
    winner_stream.next_uniform(32);  // the draw already spent on attempt one
    const int d3 = int(winner_stream.next_uniform(32));
    const int remainder = dmax - dmin;
    const Microseconds t1 = ack_end + 50 + 20 * std::min(d3, remainder);
    CHECK(res[1].time_us == t1 + kAir60At11M);
    if (d3 == remainder) {
        CHECK(res[1].transmitters == 2);
        CHECK_FALSE(res[1].success);
    } else {
        CHECK(res[1].transmitters == 1);
        CHECK(res[1].success);
    }
}

TEST_CASE("equal first draws collide on the decisive slot") {
    const uint64_t seed = find_seed(0, 2);
    const int d = int(RngStream(seed, 1).next_uniform(32));
    Simulation sim(saturated_config(2, 11.0, seed));
    sim.run_until_us(3'000);
    REQUIRE_FALSE(sim.log().resolutions.empty());
    const auto& r = sim.log().resolutions.front();
    CHECK(r.time_us == 50 + 20 * d + kAir60At11M);
    CHECK(r.transmitters == 2);
    CHECK_FALSE(r.success);
}

TEST_CASE("a frame is dropped once its retries are exhausted") {
    ScenarioConfig cfg = saturated_config(1, 11.0, 5);
    cfg.ber.ber = {0.0, 0.0, 0.0, 0.5};  // (1-0.5)^752 underflows: every frame errors
    Simulation sim(cfg);
    sim.run();
    const auto& log = sim.log();
    REQUIRE_FALSE(log.records.empty());
    for (const auto& rec : log.records) {
        CHECK(rec.outcome == TxResult::Dropped);
        CHECK(rec.retries == 7);
    }
    for (const auto& r : log.resolutions) CHECK_FALSE(r.success);
    // eight attempts on air per abandoned frame
    CHECK(log.resolutions.size() == 8 * log.records.size());
    CHECK(frame_loss_ratio(log) == 1.0);
}

TEST_CASE("identical configuration and seed replay byte-identical results") {
    ScenarioConfig cfg;
    cfg.voice_calls = 3;
    cfg.duration_s = 4.0;
    cfg.seed = 21;
    MetricsReport a = run_scenario(cfg);
    MetricsReport b = run_scenario(cfg);
    CHECK(emit_csv(a) == emit_csv(b));

    Simulation s1(cfg), s2(cfg);
    s1.run();
    s2.run();
    CHECK(s1.log() == s2.log());
}

TEST_CASE("EDCA data stations wait their longer AIFS") {
    ScenarioConfig cfg = saturated_config(1, 11.0, 33);
    cfg.controller = ControllerKind::Edca;
    Simulation sim(cfg);
    sim.run_until_us(3'000);
    const int d = int(RngStream(33, 1).next_uniform(32));
    REQUIRE_FALSE(sim.log().resolutions.empty());
    // data AIFS = SIFS + 3 slots = 70 us
    CHECK(sim.log().resolutions.front().time_us == 70 + 20 * d + kAir60At11M);
}

TEST_CASE("admission control blocks a call that would break the reserve") {
    ScenarioConfig cfg;
    cfg.voice_calls = 2;
    cfg.controller = ControllerKind::Fixed;
    cfg.fixed_rate_mbps = 11.0;
    cfg.admission_target_pct = 90.0;
    cfg.duration_s = 2.0;
    cfg.seed = 1;
    Simulation sim(cfg);
    sim.run();
    CHECK(sim.admitted_calls() == 1);
    CHECK(sim.blocked_calls() == 1);
    CHECK(sim.offered_calls() == 2);
    // blocked stations stay silent: every record comes from the AP or STA 1
    for (const auto& rec : sim.log().records) CHECK(rec.station <= 1);
}

TEST_CASE("the RTS/CTS handshake costs throughput for small frames") {
    ScenarioConfig off = saturated_config(1, 11.0, 9);
    ScenarioConfig on = off;
    on.rts_cts = true;
    const MetricsReport r_off = run_scenario(off);
    const MetricsReport r_on = run_scenario(on);
    CHECK(r_on.summary_throughput_bps() < r_off.summary_throughput_bps());
    CHECK(r_on.delivered > 0);
}

TEST_CASE("talkspurt sources thin the offered load") {
    ScenarioConfig always;
    always.voice_calls = 1;
    always.duration_s = 8.0;
    always.seed = 4;
    ScenarioConfig gated = always;
    gated.talkspurt = true;
    const MetricsReport a = run_scenario(always);
    const MetricsReport g = run_scenario(gated);
    CHECK(g.delivered > 0);
    CHECK(g.delivered < a.delivered);
}

TEST_CASE("per-chain ladder updates ignore intermediate retries") {
    // with heavy loss at 11M the per-attempt ladder backs off, the per-chain
    // ladder only reacts to whole-frame outcomes
    ScenarioConfig cfg = saturated_config(1, 11.0, 6);
    cfg.controller = ControllerKind::Bdm;
    cfg.data_frame_bytes = 1500;
    cfg.duration_s = 5.0;
    ScenarioConfig chain = cfg;
    chain.bdm_granularity = UpdateGranularity::PerChain;
    const MetricsReport attempt_rep = run_scenario(cfg);
    const MetricsReport chain_rep = run_scenario(chain);
    auto lowest_rate_seen = [](const MetricsLog&) { return 0; };
    (void)lowest_rate_seen;
    // chains almost never fail outright, so the chain ladder stays at the top
    // and keeps suffering errors; the attempt ladder sheds them
    CHECK(attempt_rep.loss_ratio() <= chain_rep.loss_ratio());
    CHECK(attempt_rep.delivered > 0);
    CHECK(chain_rep.delivered > 0);
}
