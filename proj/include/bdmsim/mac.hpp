#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "bdmsim/rng.hpp"
#include "bdmsim/sim_core.hpp"

namespace bdmsim {

// 802.11b DCF timing set. Defaults are the standard long-preamble 802.11b
// parameters: 50/10/20 us DIFS/SIFS/slot, CW 32..1023, 192 us PHY header,
// 34 byte MAC header, 248 us ACK (complete ACK on air, preamble included),
// 1 Mbps control rate.
struct MacTiming {
    Microseconds difs_us = 50;
    Microseconds sifs_us = 10;
    Microseconds slot_us = 20;
    int cw_min = 32;
    int cw_max = 1023;
    Microseconds phy_header_us = 192;
    int mac_header_bytes = 34;
    Microseconds ack_us = 248;
    int64_t basic_rate_bps = 1'000'000;
    int retry_limit = 7;

    // ACK timeout measured from the end of the data frame: SIFS + ACK plus
    // one slot of guard, the minimal window that never truncates a real ACK.
    Microseconds ack_timeout_after_data_us() const { return sifs_us + ack_us + slot_us; }

    void validate() const;

    friend bool operator==(const MacTiming&, const MacTiming&) = default;
};

// The four 802.11b PHY rates as an ordered ladder: level 0 -> 1 Mbps,
// 1 -> 2 Mbps, 2 -> 5.5 Mbps, 3 -> 11 Mbps.
class DataRate {
public:
    static constexpr int kLevels = 4;

    explicit DataRate(int level);
    static DataRate from_bps(int64_t bps);

    int level() const { return level_; }
    int64_t bps() const { return kBps[size_t(level_)]; }
    std::string label() const;

    friend bool operator==(const DataRate&, const DataRate&) = default;

private:
    static constexpr std::array<int64_t, kLevels> kBps = {
        1'000'000, 2'000'000, 5'500'000, 11'000'000};
    int level_;
};

enum class TxOutcome : uint8_t { Success, Failure };

// Time on air for one data frame: PHY header plus the MAC header and payload
// serialized at `rate`, rounded up to whole microseconds.
Microseconds frame_airtime_us(int payload_bytes, int mac_header_bytes, DataRate rate,
                              Microseconds phy_header_us = 192);

// Uniform draw in [0, cw - 1] slots.
int draw_backoff(int cw, RngStream& rng);

// Binary exponential backoff: failure doubles the window up to cw_max,
// success resets it to cw_min.
int advance_cw(int cw, TxOutcome outcome, int cw_min, int cw_max);

// Per-rate bit error probabilities. The shipped default is zero at 1 Mbps
// and grows monotonically with the rate so that rate adaptation has real
// up/down pressure to respond to.
struct BerTable {
    std::array<double, DataRate::kLevels> ber = {0.0, 1e-6, 1e-5, 1e-4};

    double at(DataRate rate) const { return ber[size_t(rate.level())]; }
    void validate() const;

    friend bool operator==(const BerTable&, const BerTable&) = default;
};

// Frame error probability for an independent-bit-error channel:
// 1 - (1 - ber)^bits. Strictly increasing in frame size and in ber.
double frame_error_rate(int payload_bytes, int mac_header_bytes, DataRate rate,
                        const BerTable& table);

enum class CoverageProfile : uint8_t {
    Dot11b,  // 11 Mbps out to 48 m, the usable voice range
    Mixed,   // the a/g ladder (54..18 Mbps) alongside the 11 Mbps row
};

// Highest rate whose range row covers the distance; empty when the distance
// is beyond coverage (the caller decides how to treat such a station).
std::optional<int64_t> rate_for_distance_bps(double distance_m, CoverageProfile profile);

enum class ResolveResult : uint8_t { Delivered, Collision, ChannelError };

// Outcome of one medium occupancy: two or more simultaneous transmitters
// always collide; a lone transmitter fails with probability fer.
ResolveResult resolve_transmission(int transmitter_count, double fer, RngStream& error_rng);

}  // namespace bdmsim
