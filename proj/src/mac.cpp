#include "bdmsim/mac.hpp"

#include <cmath>
#include <stdexcept>

namespace bdmsim {

void MacTiming::validate() const {
    if (sifs_us <= 0 || difs_us <= sifs_us)
        throw std::invalid_argument("MacTiming: requires 0 < sifs < difs");
    if (slot_us <= 0) throw std::invalid_argument("MacTiming: slot must be positive");
    if (cw_min < 1 || cw_min >= cw_max)
        throw std::invalid_argument("MacTiming: requires 1 <= cw_min < cw_max");
    if (phy_header_us < 0 || ack_us <= 0 || mac_header_bytes < 0)
        throw std::invalid_argument("MacTiming: negative duration");
    if (basic_rate_bps <= 0) throw std::invalid_argument("MacTiming: basic rate must be positive");
    if (retry_limit < 0) throw std::invalid_argument("MacTiming: retry limit must be >= 0");
}

DataRate::DataRate(int level) : level_(level) {
    if (level < 0 || level >= kLevels)
        throw std::invalid_argument("DataRate: level out of range 0..3");
}

DataRate DataRate::from_bps(int64_t bps) {
    for (int l = 0; l < kLevels; ++l)
        if (kBps[size_t(l)] == bps) return DataRate(l);
    throw std::invalid_argument("DataRate: not an 802.11b rate: " + std::to_string(bps));
}

std::string DataRate::label() const {
    switch (level_) {
        case 0: return "1M";
        case 1: return "2M";
        case 2: return "5.5M";
        default: return "11M";
    }
}

Microseconds frame_airtime_us(int payload_bytes, int mac_header_bytes, DataRate rate,
                              Microseconds phy_header_us) {
    if (payload_bytes < 0 || mac_header_bytes < 0)
        throw std::invalid_argument("frame_airtime_us: negative size");
    const int64_t bits = 8LL * (int64_t(mac_header_bytes) + payload_bytes);
    // ceil(bits * 1e6 / bps) whole microseconds of serialization time
    const int64_t serialize_us = (bits * 1'000'000 + rate.bps() - 1) / rate.bps();
    return phy_header_us + serialize_us;
}

int draw_backoff(int cw, RngStream& rng) {
    if (cw < 1) throw std::invalid_argument("draw_backoff: cw must be >= 1");
    return int(rng.next_uniform(uint64_t(cw)));
}

int advance_cw(int cw, TxOutcome outcome, int cw_min, int cw_max) {
    if (cw < cw_min || cw > cw_max) throw std::invalid_argument("advance_cw: cw out of range");
    if (outcome == TxOutcome::Success) return cw_min;
    return std::min(2 * cw, cw_max);
}

void BerTable::validate() const {
    for (double b : ber)
        if (!(b >= 0.0) || b >= 1.0)
            throw std::invalid_argument("BerTable: ber values must lie in [0, 1)");
}

double frame_error_rate(int payload_bytes, int mac_header_bytes, DataRate rate,
                        const BerTable& table) {
    const double ber = table.at(rate);
    if (!(ber >= 0.0) || ber >= 1.0)
        throw std::invalid_argument("frame_error_rate: ber must lie in [0, 1)");
    if (ber == 0.0) return 0.0;
    const double bits = 8.0 * (double(mac_header_bytes) + double(payload_bytes));
    // log-domain form of 1 - (1 - ber)^bits; exact for tiny ber * bits
    return -std::expm1(bits * std::log1p(-ber));
}

namespace {

struct RangeRow {
    int64_t bps;
    double lo_m;
    double hi_m;
};

// Rate/range rows for the mixed a/g deployment; scanned highest rate first,
// so a distance covered by several rows resolves to the fastest one.
constexpr RangeRow kMixedRows[] = {
    {54'000'000, 0.0, 27.0}, {48'000'000, 27.0, 29.0}, {36'000'000, 29.0, 30.0},
    {24'000'000, 30.0, 42.0}, {18'000'000, 42.0, 54.0}, {11'000'000, 0.0, 48.0},
};

}  // namespace

std::optional<int64_t> rate_for_distance_bps(double distance_m, CoverageProfile profile) {
    if (!(distance_m >= 0.0))
        throw std::invalid_argument("rate_for_distance_bps: distance must be >= 0");
    if (profile == CoverageProfile::Dot11b) {
        // 802.11b reaches further, but only the first 48 m are usable for voice.
        if (distance_m <= 48.0) return 11'000'000;
        return std::nullopt;
    }
    for (const auto& row : kMixedRows)
        if (distance_m >= row.lo_m && distance_m <= row.hi_m) return row.bps;
    return std::nullopt;
}

ResolveResult resolve_transmission(int transmitter_count, double fer, RngStream& error_rng) {
    if (transmitter_count < 1)
        throw std::invalid_argument("resolve_transmission: no transmitters");
    if (transmitter_count > 1) return ResolveResult::Collision;
    if (fer > 0.0 && error_rng.next_double() < fer) return ResolveResult::ChannelError;
    return ResolveResult::Delivered;
}

}  // namespace bdmsim
