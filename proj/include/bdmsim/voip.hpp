#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bdmsim/rng.hpp"
#include "bdmsim/sim_core.hpp"

namespace bdmsim {

/// Voice codec: the media bit rate before any packetization overhead.
/// G.711 runs at 64 kbps (8000 bytes/s), G.729 at 8 kbps (1000 bytes/s).
struct CodecProfile {
    std::string name;
    int64_t media_bps = 0;

    int64_t bytes_per_second() const { return media_bps / 8; }

    static CodecProfile g711() { return {"g711", 64'000}; }
    static CodecProfile g729() { return {"g729", 8'000}; }
    static std::optional<CodecProfile> by_name(std::string_view name);

    friend bool operator==(const CodecProfile&, const CodecProfile&) = default;
};

enum class HeaderMode : uint8_t { Full, Compressed };

/// RTP/UDP/IP encapsulation: 12 + 8 + 20 = 40 bytes per packet, or 2 bytes
/// when header compression is in use.
struct HeaderStack {
    static constexpr int kIpBytes = 20;
    static constexpr int kUdpBytes = 8;
    static constexpr int kRtpBytes = 12;
    static constexpr int kCompressedBytes = 2;

    HeaderMode mode = HeaderMode::Full;

    int bytes() const {
        return mode == HeaderMode::Full ? kIpBytes + kUdpBytes + kRtpBytes : kCompressedBytes;
    }
    int bits() const { return 8 * bytes(); }

    friend bool operator==(const HeaderStack&, const HeaderStack&) = default;
};

/// One direction of a call: codec, packetization interval and header mode,
/// plus the optional on/off speech activity model.
struct VoipFlow {
    CodecProfile codec = CodecProfile::g729();
    int ptime_ms = 20;
    HeaderStack header;
    bool talkspurt_on_off = false;  // false = always-on source
    double mean_talkspurt_s = 1.0;
    double mean_silence_s = 1.5;

    int packets_per_second() const { return 1000 / ptime_ms; }
};

/// Bytes of encoded voice carried by one packet: bytes_per_second * ptime.
/// Rejects codec/ptime pairs that do not produce whole bytes.
int packet_payload_bytes(const CodecProfile& codec, int ptime_ms);

/// Header bit rate: packets-per-second times header bits. Full headers at
/// 20 ms cost exactly 16000 bps; halving the packet rate halves this.
double header_overhead_bps(int ptime_ms, HeaderMode mode);

/// One-way bandwidth of a call: media rate plus header overhead.
double per_call_bandwidth_bps(const VoipFlow& flow);

/// MAC payload of one voice packet: encoded voice plus the RTP/UDP/IP bytes.
int voice_mac_payload_bytes(const VoipFlow& flow);

/// Inputs to the spare-capacity call count: a correction factor for real
/// network performance, the real bandwidth, the part of it already used for
/// data transmission, and the per-call codec bandwidth.
struct CapacityInputs {
    double correc_fac = 0.7;
    double rb_bps = 0.0;
    double rbt_bps = 0.0;
    double codec_bw_bps = 0.0;

    void validate() const;
};

/// floor(correc_fac * (rb - rbt) / codec_bw) whole calls.
int64_t number_of_calls(const CapacityInputs& inputs);

/// The same ratio before flooring, for comparison output.
double calls_ratio(const CapacityInputs& inputs);

/// Erlang-B blocking probability for `servers` channels offered
/// `offered_erlangs` of traffic. Computed with the standard inverse
/// recursion 1/B(n) = 1 + (n/A)/B(n-1), the numerically stable form of
/// B(n) = A B(n-1) / (n + A B(n-1)); B(0) = 1.
double erlang_b(int servers, double offered_erlangs);

/// Packet arrival process of one flow. Always-on sources emit on an exact
/// ptime grid; the on/off model draws exponentially distributed talkspurt
/// and silence durations from the owning station's stream and emits only
/// during talkspurts.
class VoiceSource {
public:
    VoiceSource(const VoipFlow& flow, Microseconds start_us);

    // Successive packet arrival times, non-decreasing; the first call yields
    // the start time. Pass the station stream for the on/off duration draws.
    Microseconds next_arrival_us(RngStream& rng);

private:
    Microseconds ptime_us_;
    bool on_off_;
    double mean_on_s_;
    double mean_off_s_;
    Microseconds next_grid_us_;
    Microseconds spurt_end_us_ = 0;
    bool in_spurt_ = false;
};

}  // namespace bdmsim
