#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdmsim/controller.hpp"
#include "bdmsim/mac.hpp"
#include "bdmsim/metrics.hpp"
#include "bdmsim/voip.hpp"

namespace bdmsim {

enum class ControllerKind : uint8_t { Bdm, Fixed, Arf, Edca };

// Full description of one run. Parsed from the line-oriented key=value
// scenario format ('#' starts a comment); every field has a default except
// the station count.
struct ScenarioConfig {
    int voice_calls = 0;      // key: stations
    int data_stations = 0;    // saturated unless data_rate_kbps > 0
    double duration_s = 30.0;
    uint64_t seed = 1;

    ControllerKind controller = ControllerKind::Bdm;
    double fixed_rate_mbps = 11.0;

    CodecProfile codec = CodecProfile::g729();
    int ptime_ms = 20;
    HeaderMode header_mode = HeaderMode::Full;
    bool talkspurt = false;
    double mean_talkspurt_s = 1.0;
    double mean_silence_s = 1.5;

    double distance_m = 30.0;
    std::vector<double> distances;  // optional per-voice-station override
    CoverageProfile coverage = CoverageProfile::Dot11b;

    MacTiming timing;
    BerTable ber;
    bool rts_cts = false;

    Microseconds util_window_us = 1'000'000;
    Microseconds util_tick_us = 100'000;
    Microseconds report_window_us = 1'000'000;

    double admission_target_pct = 0.0;  // 0 disables admission control
    double admission_margin = 1.15;
    Microseconds call_start_interval_us = 500'000;

    int data_frame_bytes = 1500;
    double data_rate_kbps = 0.0;  // 0 = saturated data source

    double correc_fac = 0.7;
    UpdateGranularity bdm_granularity = UpdateGranularity::PerAttempt;
    int bdm_initial_rate_level = 0;
    int bdm_initial_free_level = 4;
    bool throughput_include_mac = false;

    VoipFlow voice_flow() const;
    std::string controller_id() const;  // controller plus its fixed rate
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct ScenarioParseError : std::runtime_error {
    ScenarioParseError(int line, const std::string& key, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) +
                             (key.empty() ? "" : ", key '" + key + "'") + ": " + what),
          line_no(line), key(key) {}
    int line_no;
    std::string key;
};

ScenarioConfig parse_scenario(const std::string& text);

MetricsReport run_scenario(const ScenarioConfig& config);

// Side-by-side report for configurations that differ only in controller.
class ComparisonTable {
public:
    struct Entry {
        std::string controller;
        MetricsReport report;
    };

    explicit ComparisonTable(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }

    // Percentage delta of a metric against entry 0; recomputed from the
    // underlying reports every time.
    double delta_pct(size_t entry, double (*metric)(const MetricsReport&)) const;

    std::string render() const;

private:
    std::vector<Entry> entries_;
};

// Runs every config with its own seed (callers pass identical seeds for a
// like-for-like comparison) and tabulates the reports. Configs that differ
// in anything but the controller are rejected.
ComparisonTable compare(const std::vector<ScenarioConfig>& configs);

// CSV time series: one row per window plus a trailing summary row. All
// numeric columns carry six decimals, formatted from integers, so output is
// locale-independent and byte-stable; the utilization and free columns sum
// to exactly 100 in decimal.
std::string emit_csv(const MetricsReport& report);

// Parsed CSV cell grid (header stripped), micro-unit integers per column.
struct CsvDocument {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvDocument parse_csv(const std::string& text);

// Exact fixed-point conversion of an emitted cell ("12.500000" -> 12500000);
// understands "nan".
int64_t csv_cell_to_micro(const std::string& cell);

}  // namespace bdmsim
