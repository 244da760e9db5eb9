#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bdmsim/scenario.hpp"
#include "bdmsim/voip.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

void print_summary(std::ostream& os, const bdmsim::MetricsReport& rep) {
    os << "controller          " << rep.controller_label << '\n';
    os << "duration_s          " << double(rep.duration_us) / 1e6 << '\n';
    os << "delivered_frames    " << rep.delivered << '\n';
    os << "dropped_frames      " << rep.dropped << '\n';
    os << "throughput_bps      " << rep.summary_throughput_bps() << '\n';
    os << "max_window_bps      " << rep.max_window_throughput_bps() << '\n';
    os << "loss_ratio          " << rep.loss_ratio() << '\n';
    if (auto d = rep.mean_delay_ms()) os << "mean_delay_ms       " << *d << '\n';
    os << "utilization_pct     " << rep.utilization() << '\n';
    os << "free_bw_pct         " << rep.free_bw_pct() << '\n';
    os << "capacity_calls      " << rep.capacity_calls() << '\n';
    for (const auto& line : rep.metadata) os << "meta " << line << '\n';
}

int run_command(const std::string& file, bool seed_set, uint64_t seed, const std::string& out_path,
                int batch) {
    bdmsim::ScenarioConfig cfg = bdmsim::parse_scenario(read_file(file));
    if (seed_set) cfg.seed = seed;

    auto one = [&](const bdmsim::ScenarioConfig& c, const std::string& path) {
        bdmsim::MetricsReport rep = bdmsim::run_scenario(c);
        const std::string csv = bdmsim::emit_csv(rep);
        if (path.empty()) {
            std::cout << csv;
            print_summary(std::cerr, rep);
        } else {
            write_file(path, csv);
            print_summary(std::cout, rep);
            std::cout << "csv " << path << '\n';
        }
    };

    if (batch <= 0) {
        one(cfg, out_path);
        return 0;
    }
    for (int s = 1; s <= batch; ++s) {
        bdmsim::ScenarioConfig c = cfg;
        c.seed = uint64_t(s);
        std::string path = out_path;
        if (!path.empty()) path += ".seed" + std::to_string(s) + ".csv";
        one(c, path);
    }
    return 0;
}

int compare_command(const std::vector<std::string>& files, bool seed_set, uint64_t seed,
                    const std::string& out_path) {
    std::vector<bdmsim::ScenarioConfig> configs;
    configs.reserve(files.size());
    for (const auto& f : files) {
        bdmsim::ScenarioConfig cfg = bdmsim::parse_scenario(read_file(f));
        if (seed_set) cfg.seed = seed;
        configs.push_back(cfg);
    }
    bdmsim::ComparisonTable table = bdmsim::compare(configs);
    const std::string text = table.render();
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    return 0;
}

int calc_bandwidth(const std::string& codec_name, int ptime_ms, const std::string& mode) {
    auto codec = bdmsim::CodecProfile::by_name(codec_name);
    if (!codec) throw std::runtime_error("unknown codec: " + codec_name);
    bdmsim::VoipFlow flow;
    flow.codec = *codec;
    flow.ptime_ms = ptime_ms;
    if (mode == "full") flow.header.mode = bdmsim::HeaderMode::Full;
    else if (mode == "compressed") flow.header.mode = bdmsim::HeaderMode::Compressed;
    else throw std::runtime_error("header mode must be full or compressed");
    const double bw = bdmsim::per_call_bandwidth_bps(flow);
    if (bw == double(int64_t(bw)))
        std::printf("%lld\n", static_cast<long long>(bw));
    else
        std::printf("%.6f\n", bw);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"802.11b VoIP capacity simulator and planning calculator"};
    app.require_subcommand(1);

    std::string scenario_file;
    std::vector<std::string> compare_files;
    std::string out_path;
    uint64_t seed = 0;
    int batch = 0;

    auto* run = app.add_subcommand("run", "run one scenario and emit its CSV time series");
    run->add_option("scenario", scenario_file, "scenario file")->required();
    auto* run_seed = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_path, "write the CSV here instead of stdout");
    run->add_option("--batch", batch, "run seeds 1..N, suffixing --out per seed");

    auto* cmp = app.add_subcommand("compare",
                                   "run scenarios differing only in controller, print deltas");
    cmp->add_option("scenarios", compare_files, "two or more scenario files")
        ->required()
        ->expected(2, -1);
    auto* cmp_seed = cmp->add_option("--seed", seed, "override every scenario seed");
    cmp->add_option("--out", out_path, "write the table here instead of stdout");

    auto* calc = app.add_subcommand("calc", "planning calculators");
    calc->require_subcommand(1);

    std::string codec_name = "g729", header_mode = "full";
    int ptime_ms = 20;
    auto* bw = calc->add_subcommand("bandwidth", "one-way bandwidth of a call, bps");
    bw->add_option("codec", codec_name, "g711 or g729")->required();
    bw->add_option("ptime_ms", ptime_ms, "packetization interval")->required();
    bw->add_option("mode", header_mode, "full or compressed")->required();

    double correc_fac = 0.7, rb = 0.0, rbt = 0.0, codec_bw = 0.0;
    auto* calls = calc->add_subcommand("calls", "whole calls supported by spare bandwidth");
    calls->add_option("correc_fac", correc_fac)->required();
    calls->add_option("rb_bps", rb)->required();
    calls->add_option("rbt_bps", rbt)->required();
    calls->add_option("codec_bw_bps", codec_bw)->required();

    int servers = 0;
    double erlangs = 0.0;
    auto* erl = calc->add_subcommand("erlang", "Erlang-B blocking probability");
    erl->add_option("servers", servers)->required();
    erl->add_option("offered_erlangs", erlangs)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(scenario_file, run_seed->count() > 0, seed, out_path, batch);
        if (cmp->parsed())
            return compare_command(compare_files, cmp_seed->count() > 0, seed, out_path);
        if (bw->parsed()) return calc_bandwidth(codec_name, ptime_ms, header_mode);
        if (calls->parsed()) {
            bdmsim::CapacityInputs in{correc_fac, rb, rbt, codec_bw};
            std::printf("%lld\n", static_cast<long long>(bdmsim::number_of_calls(in)));
            return 0;
        }
        if (erl->parsed()) {
            std::printf("%.6f\n", bdmsim::erlang_b(servers, erlangs));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    std::cerr << "error: no command\n";
    return 1;
}
