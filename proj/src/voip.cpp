#include "bdmsim/voip.hpp"

#include <cmath>
#include <stdexcept>

namespace bdmsim {

std::optional<CodecProfile> CodecProfile::by_name(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name) lower.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "g711" || lower == "g.711") return g711();
    if (lower == "g729" || lower == "g.729") return g729();
    return std::nullopt;
}

int packet_payload_bytes(const CodecProfile& codec, int ptime_ms) {
    if (ptime_ms < 0) throw std::invalid_argument("packet_payload_bytes: ptime must be >= 0");
    const int64_t numerator = codec.media_bps * ptime_ms;
    if (numerator % 8000 != 0)
        throw std::invalid_argument("packet_payload_bytes: " + codec.name + " at " +
                                    std::to_string(ptime_ms) + " ms is not a whole byte count");
    return int(numerator / 8000);
}

double header_overhead_bps(int ptime_ms, HeaderMode mode) {
    if (ptime_ms <= 0) throw std::invalid_argument("header_overhead_bps: ptime must be positive");
    HeaderStack stack{mode};
    return double(stack.bits()) * 1000.0 / double(ptime_ms);
}

double per_call_bandwidth_bps(const VoipFlow& flow) {
    return double(flow.codec.media_bps) + header_overhead_bps(flow.ptime_ms, flow.header.mode);
}

int voice_mac_payload_bytes(const VoipFlow& flow) {
    return packet_payload_bytes(flow.codec, flow.ptime_ms) + flow.header.bytes();
}

void CapacityInputs::validate() const {
    if (!(correc_fac > 0.0) || correc_fac > 1.0)
        throw std::invalid_argument("CapacityInputs: correction factor must lie in (0, 1]");
    if (rbt_bps < 0.0 || rb_bps < rbt_bps)
        throw std::invalid_argument("CapacityInputs: requires rb >= rbt >= 0");
    if (!(codec_bw_bps > 0.0))
        throw std::invalid_argument("CapacityInputs: codec bandwidth must be positive");
}

double calls_ratio(const CapacityInputs& inputs) {
    inputs.validate();
    return inputs.correc_fac * (inputs.rb_bps - inputs.rbt_bps) / inputs.codec_bw_bps;
}

int64_t number_of_calls(const CapacityInputs& inputs) {
    return int64_t(std::floor(calls_ratio(inputs)));
}

double erlang_b(int servers, double offered_erlangs) {
    if (servers < 0) throw std::invalid_argument("erlang_b: servers must be >= 0");
    if (offered_erlangs < 0.0) throw std::invalid_argument("erlang_b: load must be >= 0");
    if (servers == 0) return 1.0;
    if (offered_erlangs == 0.0) return 0.0;
    double inv = 1.0;  // 1 / B(0)
    for (int n = 1; n <= servers; ++n) inv = 1.0 + inv * double(n) / offered_erlangs;
    return 1.0 / inv;
}

VoiceSource::VoiceSource(const VoipFlow& flow, Microseconds start_us)
    : ptime_us_(Microseconds(flow.ptime_ms) * 1000),
      on_off_(flow.talkspurt_on_off),
      mean_on_s_(flow.mean_talkspurt_s),
      mean_off_s_(flow.mean_silence_s),
      next_grid_us_(start_us) {
    if (ptime_us_ <= 0) throw std::invalid_argument("VoiceSource: ptime must be positive");
    if (on_off_ && (!(mean_on_s_ > 0.0) || !(mean_off_s_ > 0.0)))
        throw std::invalid_argument("VoiceSource: talkspurt durations must be positive");
}

Microseconds VoiceSource::next_arrival_us(RngStream& rng) {
    if (!on_off_) {
        Microseconds t = next_grid_us_;
        next_grid_us_ += ptime_us_;
        return t;
    }
    auto exp_us = [&](double mean_s) {
        double u = rng.next_double();
        return Microseconds(std::llround(-mean_s * 1e6 * std::log1p(-u))) + 1;
    };
    if (!in_spurt_) {
        in_spurt_ = true;
        spurt_end_us_ = next_grid_us_ + exp_us(mean_on_s_);
    }
    while (next_grid_us_ >= spurt_end_us_) {
        // silence gap, then the grid re-anchors at the next talkspurt
        Microseconds spurt_start = spurt_end_us_ + exp_us(mean_off_s_);
        next_grid_us_ = spurt_start;
        spurt_end_us_ = spurt_start + exp_us(mean_on_s_);
    }
    Microseconds t = next_grid_us_;
    next_grid_us_ += ptime_us_;
    return t;
}

}  // namespace bdmsim
