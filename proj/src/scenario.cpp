#include "bdmsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bdmsim/simulation.hpp"

namespace bdmsim {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line, const std::string& key) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ScenarioParseError(line, key, "not a number: '" + v + "'");
    return out;
}

int64_t parse_int(const std::string& v, int line, const std::string& key) {
    int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ScenarioParseError(line, key, "not an integer: '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ScenarioParseError(line, key, "expected on/off: '" + v + "'");
}

void check_fixed_rate(double mbps, int line, const std::string& key) {
    if (mbps != 1.0 && mbps != 2.0 && mbps != 5.5 && mbps != 11.0)
        throw ScenarioParseError(line, key, "fixed rate must be 1, 2, 5.5 or 11");
}

// non-negative fixed-point value printed with six decimals, locale-free
std::string micro_str(int64_t micro) {
    if (micro < 0) throw std::logic_error("micro_str: negative value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(micro / 1'000'000),
                  static_cast<long long>(micro % 1'000'000));
    return buf;
}

int64_t round_ratio_micro(int64_t num, int64_t den) {
    if (den == 0) return 0;
    return (num * 1'000'000 + den / 2) / den;
}

int64_t double_to_micro(double v) { return static_cast<int64_t>(std::llround(v * 1e6)); }

}  // namespace

VoipFlow ScenarioConfig::voice_flow() const {
    VoipFlow flow;
    flow.codec = codec;
    flow.ptime_ms = ptime_ms;
    flow.header = HeaderStack{header_mode};
    flow.talkspurt_on_off = talkspurt;
    flow.mean_talkspurt_s = mean_talkspurt_s;
    flow.mean_silence_s = mean_silence_s;
    return flow;
}

std::string ScenarioConfig::controller_id() const {
    switch (controller) {
        case ControllerKind::Bdm: return "bdm";
        case ControllerKind::Arf: return "arf";
        case ControllerKind::Edca: return "edca";
        case ControllerKind::Fixed: {
            if (fixed_rate_mbps == 5.5) return "fixed:5.5M";
            return "fixed:" + std::to_string(int(fixed_rate_mbps)) + "M";
        }
    }
    return "?";
}

void ScenarioConfig::validate() const {
    if (voice_calls < 0 || data_stations < 0)
        throw std::invalid_argument("station counts must be >= 0");
    if (voice_calls + data_stations < 1)
        throw std::invalid_argument("total station count must be >= 1");
    if (voice_calls > 50) throw std::invalid_argument("stations limited to 50");
    if (data_stations > 50) throw std::invalid_argument("data_stations limited to 50");
    if (!(duration_s > 0.0)) throw std::invalid_argument("duration must be positive");
    timing.validate();
    ber.validate();
    if (ptime_ms <= 0 || 1000 % ptime_ms != 0)
        throw std::invalid_argument("ptime_ms must divide 1000 evenly");
    packet_payload_bytes(codec, ptime_ms);  // rejects fractional-byte packetization
    if (talkspurt && (!(mean_talkspurt_s > 0.0) || !(mean_silence_s > 0.0)))
        throw std::invalid_argument("talkspurt durations must be positive");
    if (!distances.empty() && int(distances.size()) != voice_calls)
        throw std::invalid_argument("distances list must name every voice station");
    auto check_distance = [&](double d) {
        if (!rate_for_distance_bps(d, coverage))
            throw std::invalid_argument("distance " + std::to_string(d) +
                                        " m is outside the coverage profile");
    };
    if (distances.empty()) {
        if (voice_calls + data_stations > 0) check_distance(distance_m);
    } else {
        for (double d : distances) check_distance(d);
        if (data_stations > 0) check_distance(distance_m);
    }
    if (controller == ControllerKind::Fixed && fixed_rate_mbps != 1.0 && fixed_rate_mbps != 2.0 &&
        fixed_rate_mbps != 5.5 && fixed_rate_mbps != 11.0)
        throw std::invalid_argument("fixed rate must be 1, 2, 5.5 or 11 Mbps");
    if (util_tick_us <= 0 || util_window_us <= 0 || util_window_us % util_tick_us != 0)
        throw std::invalid_argument("utilization window must be a multiple of the tick");
    if (report_window_us <= 0 || report_window_us % util_tick_us != 0)
        throw std::invalid_argument("report window must be a multiple of the utilization tick");
    if (admission_target_pct < 0.0 || admission_target_pct > 100.0)
        throw std::invalid_argument("admission target must lie in [0, 100]");
    if (!(admission_margin > 0.0)) throw std::invalid_argument("admission margin must be positive");
    if (call_start_interval_us < 0) throw std::invalid_argument("call interval must be >= 0");
    if (data_frame_bytes < 0 || data_frame_bytes > 4096)
        throw std::invalid_argument("data frame size must lie in [0, 4096]");
    if (data_rate_kbps < 0.0) throw std::invalid_argument("data rate must be >= 0");
    if (!(correc_fac > 0.0) || correc_fac > 1.0)
        throw std::invalid_argument("correc_fac must lie in (0, 1]");
    if (bdm_initial_rate_level < 0 || bdm_initial_rate_level >= kBdmRateLevels)
        throw std::invalid_argument("bdm initial rate level out of range");
    if (bdm_initial_free_level < 0 || bdm_initial_free_level >= kBdmFreeBwLevels)
        throw std::invalid_argument("bdm initial free-bandwidth level out of range");
}

ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig cfg;
    bool saw_stations = false;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioParseError(line_no, "", "expected key=value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ScenarioParseError(line_no, key, "empty key or value");

        auto as_int = [&] { return parse_int(val, line_no, key); };
        auto as_double = [&] { return parse_double(val, line_no, key); };
        auto as_bool = [&] { return parse_bool(val, line_no, key); };
        auto range_error = [&](const std::string& what) -> ScenarioParseError {
            return ScenarioParseError(line_no, key, what);
        };

        if (key == "stations") {
            int64_t v = as_int();
            if (v < 0 || v > 50) throw range_error("stations must lie in [0, 50]");
            cfg.voice_calls = int(v);
            saw_stations = true;
        } else if (key == "data_stations") {
            int64_t v = as_int();
            if (v < 0 || v > 50) throw range_error("data_stations must lie in [0, 50]");
            cfg.data_stations = int(v);
        } else if (key == "duration_s") {
            cfg.duration_s = as_double();
            if (!(cfg.duration_s > 0.0)) throw range_error("duration must be positive");
        } else if (key == "seed") {
            cfg.seed = uint64_t(as_int());
        } else if (key == "controller") {
            if (val == "bdm") cfg.controller = ControllerKind::Bdm;
            else if (val == "arf") cfg.controller = ControllerKind::Arf;
            else if (val == "edca") cfg.controller = ControllerKind::Edca;
            else if (val == "fixed") cfg.controller = ControllerKind::Fixed;
            else if (val.rfind("fixed:", 0) == 0) {
                cfg.controller = ControllerKind::Fixed;
                cfg.fixed_rate_mbps = parse_double(val.substr(6), line_no, key);
                check_fixed_rate(cfg.fixed_rate_mbps, line_no, key);
            } else throw range_error("unknown controller '" + val + "'");
        } else if (key == "fixed_rate_mbps") {
            cfg.fixed_rate_mbps = as_double();
            check_fixed_rate(cfg.fixed_rate_mbps, line_no, key);
        } else if (key == "codec") {
            auto c = CodecProfile::by_name(val);
            if (!c) throw range_error("unknown codec '" + val + "'");
            cfg.codec = *c;
        } else if (key == "ptime_ms") {
            int64_t v = as_int();
            if (v <= 0 || 1000 % v != 0) throw range_error("ptime_ms must divide 1000 evenly");
            cfg.ptime_ms = int(v);
        } else if (key == "header_mode") {
            if (val == "full") cfg.header_mode = HeaderMode::Full;
            else if (val == "compressed") cfg.header_mode = HeaderMode::Compressed;
            else throw range_error("header_mode must be full or compressed");
        } else if (key == "talkspurt") {
            cfg.talkspurt = as_bool();
        } else if (key == "mean_talkspurt_s") {
            cfg.mean_talkspurt_s = as_double();
        } else if (key == "mean_silence_s") {
            cfg.mean_silence_s = as_double();
        } else if (key == "distance_m") {
            cfg.distance_m = as_double();
            if (cfg.distance_m < 0.0) throw range_error("distance must be >= 0");
        } else if (key == "distances") {
            cfg.distances.clear();
            std::istringstream ds(val);
            std::string item;
            while (std::getline(ds, item, ','))
                cfg.distances.push_back(parse_double(trim(item), line_no, key));
        } else if (key == "coverage") {
            if (val == "b") cfg.coverage = CoverageProfile::Dot11b;
            else if (val == "mixed") cfg.coverage = CoverageProfile::Mixed;
            else throw range_error("coverage must be b or mixed");
        } else if (key == "ber_1m" || key == "ber_2m" || key == "ber_5_5m" || key == "ber_11m") {
            double v = as_double();
            if (!(v >= 0.0) || v >= 1.0) throw range_error("ber must lie in [0, 1)");
            int idx = key == "ber_1m" ? 0 : key == "ber_2m" ? 1 : key == "ber_5_5m" ? 2 : 3;
            cfg.ber.ber[size_t(idx)] = v;
        } else if (key == "rts_cts") {
            cfg.rts_cts = as_bool();
        } else if (key == "util_window_ms") {
            cfg.util_window_us = as_int() * 1000;
        } else if (key == "util_tick_ms") {
            cfg.util_tick_us = as_int() * 1000;
        } else if (key == "report_window_ms") {
            cfg.report_window_us = as_int() * 1000;
        } else if (key == "admission_target_pct") {
            cfg.admission_target_pct = as_double();
        } else if (key == "admission_margin") {
            cfg.admission_margin = as_double();
        } else if (key == "call_start_interval_ms") {
            cfg.call_start_interval_us = as_int() * 1000;
        } else if (key == "data_frame_bytes") {
            cfg.data_frame_bytes = int(as_int());
        } else if (key == "data_rate_kbps") {
            cfg.data_rate_kbps = as_double();
        } else if (key == "correc_fac") {
            cfg.correc_fac = as_double();
        } else if (key == "retry_limit") {
            cfg.timing.retry_limit = int(as_int());
        } else if (key == "bdm_granularity") {
            if (val == "attempt") cfg.bdm_granularity = UpdateGranularity::PerAttempt;
            else if (val == "chain") cfg.bdm_granularity = UpdateGranularity::PerChain;
            else throw range_error("bdm_granularity must be attempt or chain");
        } else if (key == "bdm_initial_rate_level") {
            cfg.bdm_initial_rate_level = int(as_int());
        } else if (key == "bdm_initial_free_level") {
            cfg.bdm_initial_free_level = int(as_int());
        } else if (key == "throughput_include_mac") {
            cfg.throughput_include_mac = as_bool();
        } else {
            throw ScenarioParseError(line_no, key, "unknown key");
        }
    }

    if (!saw_stations) throw ScenarioParseError(0, "stations", "missing required key");
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioParseError(0, "", e.what());
    }
    return cfg;
}

MetricsReport run_scenario(const ScenarioConfig& config) {
    Simulation sim(config);
    sim.run();
    return sim.report();
}

ComparisonTable::ComparisonTable(std::vector<Entry> entries) : entries_(std::move(entries)) {}

double ComparisonTable::delta_pct(size_t entry, double (*metric)(const MetricsReport&)) const {
    const double base = metric(entries_.at(0).report);
    const double v = metric(entries_.at(entry).report);
    if (base == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * (v - base) / base;
}

namespace {

struct MetricDef {
    const char* name;
    double (*fn)(const MetricsReport&);
};

const MetricDef kComparisonMetrics[] = {
    {"throughput_bps", [](const MetricsReport& r) { return r.summary_throughput_bps(); }},
    {"max_window_throughput_bps",
     [](const MetricsReport& r) { return r.max_window_throughput_bps(); }},
    {"utilization_pct", [](const MetricsReport& r) { return r.utilization(); }},
    {"free_bw_pct", [](const MetricsReport& r) { return r.free_bw_pct(); }},
    {"mean_delay_ms", [](const MetricsReport& r) { return r.mean_delay_ms().value_or(0.0); }},
    {"loss_ratio", [](const MetricsReport& r) { return r.loss_ratio(); }},
    {"capacity_calls", [](const MetricsReport& r) { return r.capacity_calls(); }},
};

}  // namespace

std::string ComparisonTable::render() const {
    std::ostringstream out;
    char buf[64];
    out << "metric";
    for (const auto& e : entries_) {
        std::snprintf(buf, sizeof buf, "%18s", e.controller.c_str());
        out << buf;
    }
    for (size_t i = 1; i < entries_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%16s%%", ("d_" + entries_[i].controller).c_str());
        out << buf;
    }
    out << '\n';
    for (const auto& m : kComparisonMetrics) {
        std::snprintf(buf, sizeof buf, "%-28s", m.name);
        out << buf;
        for (const auto& e : entries_) {
            std::snprintf(buf, sizeof buf, "%18.6f", m.fn(e.report));
            out << buf;
        }
        for (size_t i = 1; i < entries_.size(); ++i) {
            const double d = delta_pct(i, m.fn);
            if (std::isnan(d))
                std::snprintf(buf, sizeof buf, "%17s", "n/a");
            else
                std::snprintf(buf, sizeof buf, "%+16.2f%%", d);
            out << buf;
        }
        out << '\n';
    }
    for (const auto& e : entries_) {
        out << "# " << e.controller << ":";
        for (const auto& line : e.report.metadata) out << ' ' << line << ';';
        out << '\n';
    }
    return out.str();
}

ComparisonTable compare(const std::vector<ScenarioConfig>& configs) {
    if (configs.size() < 2)
        throw std::invalid_argument("compare: needs at least two scenarios");
    for (size_t i = 1; i < configs.size(); ++i) {
        ScenarioConfig probe = configs[i];
        probe.controller = configs[0].controller;
        probe.fixed_rate_mbps = configs[0].fixed_rate_mbps;
        if (!(probe == configs[0]))
            throw std::invalid_argument(
                "compare: scenarios may differ only in their controller");
    }
    std::vector<ComparisonTable::Entry> entries;
    entries.reserve(configs.size());
    for (const auto& cfg : configs)
        entries.push_back({cfg.controller_id(), run_scenario(cfg)});
    return ComparisonTable(std::move(entries));
}

std::string emit_csv(const MetricsReport& report) {
    std::string out =
        "time_s,throughput_bps,loss_ratio,delay_ms,utilization_pct,free_bw_pct,capacity_calls\n";
    auto append_metrics = [&out, &report](int64_t tp_micro, int64_t total, int64_t dropped,
                                          Microseconds delay_sum_us, int64_t delay_frames,
                                          int64_t util_micropct) {
        out += micro_str(tp_micro);
        out += ',';
        out += micro_str(round_ratio_micro(dropped, total));
        out += ',';
        if (delay_frames == 0)
            out += "nan";
        else
            out += micro_str((delay_sum_us * 1000 + delay_frames / 2) / delay_frames);
        out += ',';
        out += micro_str(util_micropct);
        out += ',';
        out += micro_str(100'000'000 - util_micropct);
        out += ',';
        const double tp = double(tp_micro) / 1e6;
        const double cap = report.per_call_bw_bps > 0.0 ? tp / report.per_call_bw_bps : 0.0;
        out += micro_str(double_to_micro(cap));
        out += '\n';
    };
    for (const auto& w : report.windows) {
        out += micro_str(w.end_us);  // microseconds are micro-units of seconds
        out += ',';
        append_metrics(double_to_micro(w.throughput_bps()), w.delivered + w.dropped, w.dropped,
                       w.delay_sum_us, w.delay_frames, w.utilization_micropct());
    }
    out += "summary,";
    // summary capacity derives from the peak window throughput
    {
        const int64_t tp_micro = double_to_micro(report.summary_throughput_bps());
        out += micro_str(tp_micro);
        out += ',';
        out += micro_str(round_ratio_micro(report.dropped, report.delivered + report.dropped));
        out += ',';
        if (report.delay_frames == 0)
            out += "nan";
        else
            out += micro_str((report.delay_sum_us * 1000 + report.delay_frames / 2) /
                             report.delay_frames);
        out += ',';
        const int64_t util = report.utilization_micropct();
        out += micro_str(util);
        out += ',';
        out += micro_str(100'000'000 - util);
        out += ',';
        out += micro_str(double_to_micro(report.capacity_calls()));
        out += '\n';
    }
    return out;
}

CsvDocument parse_csv(const std::string& text) {
    CsvDocument doc;
    if (text.empty() || text.back() != '\n')
        throw std::invalid_argument("parse_csv: text must be newline-terminated");
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            doc.header = std::move(cells);
            first = false;
        } else {
            doc.rows.push_back(std::move(cells));
        }
    }
    if (doc.header.empty()) throw std::invalid_argument("parse_csv: missing header");
    return doc;
}

int64_t csv_cell_to_micro(const std::string& cell) {
    if (cell == "nan") return std::numeric_limits<int64_t>::min();
    const size_t dot = cell.find('.');
    if (dot == std::string::npos || cell.size() - dot - 1 != 6)
        throw std::invalid_argument("csv_cell_to_micro: expected six decimals: '" + cell + "'");
    int64_t whole = 0, frac = 0;
    auto [p1, e1] = std::from_chars(cell.data(), cell.data() + dot, whole);
    auto [p2, e2] = std::from_chars(cell.data() + dot + 1, cell.data() + cell.size(), frac);
    if (e1 != std::errc{} || e2 != std::errc{} || p1 != cell.data() + dot ||
        p2 != cell.data() + cell.size() || whole < 0)
        throw std::invalid_argument("csv_cell_to_micro: bad cell: '" + cell + "'");
    return whole * 1'000'000 + frac;
}

}  // namespace bdmsim
