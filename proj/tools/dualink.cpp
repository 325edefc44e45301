// dualink: command-line front end for the dual-link BER simulator.
//
//   dualink run --scenario equal-sweep --modulation bpsk --out bpsk.csv
//   dualink run --scenario link-down --ebn0-plc 7.3 --ebn0-wireless down --out down.csv
//   dualink frame-dump --seed 7 --out frame.bin
//
// Exit status: 0 success, 1 bad configuration, 2 I/O failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>

#include <CLI11.hpp>

#include "dualink/config.hpp"
#include "dualink/harness.hpp"
#include "dualink/ofdm_tx.hpp"

using namespace dualink;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

struct RunOptions {
    std::string scenario = "equal-sweep";
    std::string modulation = "bpsk";
    std::string ebn0_plc;
    std::string ebn0_wireless;
    std::string knowledge = "perfect,estimated";
    std::uint64_t seed = 1;
    long long min_bits = 10'000;
    long long min_errors = 100;
    long long max_bits = 10'000'000;
    int data_symbols = 40;
    std::string out;
    bool realtime = false;
    bool common_noise = false;
    std::string config;
    std::string noise_mode = "avg-time-freq";
    int timing_advance = kDefaultTimingAdvance;
    int manual_timing = -1;
    std::string dbpsk_metric = "noise-aware";
    std::string combining = "mrc";
    std::string mode = "parallel";
    int batch = 32;
    std::string diag;
    bool quiet = false;
};

std::vector<Knowledge> parse_knowledge_list(const std::string& text)
{
    std::vector<Knowledge> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        const auto item = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        const Knowledge k = parse_knowledge(item);
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

ExecMode parse_mode(const std::string& s)
{
    for (auto m : {ExecMode::Serial, ExecMode::Parallel, ExecMode::Pipelined})
        if (s == to_string(m)) return m;
    throw ConfigError("mode", "expected serial, parallel or pipelined, got '" + s + "'");
}

DbpskMetric parse_metric(const std::string& s)
{
    if (s == "noise-aware") return DbpskMetric::NoiseAware;
    if (s == "high-snr") return DbpskMetric::HighSnr;
    throw ConfigError("dbpsk_metric", "expected noise-aware or high-snr, got '" + s + "'");
}

ScenarioConfig build_config(const RunOptions& o)
{
    ScenarioConfig cfg;
    if (!o.config.empty()) cfg.params = load_params_file(o.config);
    cfg.scenario = parse_scenario(o.scenario);
    cfg.modulation = parse_modulation(o.modulation);
    if (!o.ebn0_plc.empty()) cfg.ebn0_plc_db = parse_levels(o.ebn0_plc, "ebn0_plc");
    if (!o.ebn0_wireless.empty()) cfg.ebn0_wireless_db = parse_levels(o.ebn0_wireless, "ebn0_wireless");
    cfg.knowledge = parse_knowledge_list(o.knowledge);
    cfg.seed = o.seed;
    cfg.min_bits = o.min_bits;
    cfg.min_errors = o.min_errors;
    cfg.max_bits = std::max(o.max_bits, o.min_bits);
    cfg.n_data_symbols = o.data_symbols;
    cfg.realtime_pacing = o.realtime;
    cfg.common_noise = o.common_noise;
    cfg.receiver.noise_mode = parse_noise_mode(o.noise_mode);
    cfg.receiver.timing_advance = o.timing_advance;
    if (o.manual_timing >= 0) cfg.receiver.manual_timing = o.manual_timing;
    cfg.receiver.dbpsk_metric = parse_metric(o.dbpsk_metric);
    cfg.combining = parse_combining(o.combining);
    cfg.frames_per_batch = o.batch;
    cfg = with_defaults(cfg);
    validate(cfg);
    return cfg;
}

int cmd_run(const RunOptions& o)
{
    const ScenarioConfig cfg = build_config(o);
    const ExecMode mode = parse_mode(o.mode);

    std::unique_ptr<std::ofstream> diag;
    std::mutex diag_mu;
    OutcomeSink sink;
    if (!o.diag.empty()) {
        diag = std::make_unique<std::ofstream>(o.diag, std::ios::trunc);
        if (!*diag) throw IoError("cannot open '" + o.diag + "' for writing");
        write_diagnostics_header(*diag);
        sink = [&](const FrameOutcome& f) {
            std::lock_guard lock(diag_mu);
            write_diagnostics(f, *diag);
        };
    }

    // Fail on an unwritable output before spending minutes simulating.
    if (!o.out.empty()) {
        std::ofstream probe(o.out, std::ios::app);
        if (!probe) throw IoError("cannot open '" + o.out + "' for writing");
    }

    const auto t0 = std::chrono::steady_clock::now();
    const ResultSet rs = run_scenario(cfg, mode, sink);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (o.out.empty())
        write_csv(rs, std::cout);
    else
        write_csv_file(rs, o.out);
    if (diag && !diag->flush()) throw IoError("write to '" + o.diag + "' failed");

    if (!o.quiet) {
        std::fprintf(stderr, "%zu rows, %zu points, %.1f s (%s)\n", rs.rows.size(), sweep_points(cfg).size(), secs,
                     to_string(mode).c_str());
        CombinerStats lost;
        for (const auto& c : rs.combiner) {
            lost.dropped_plc += c.dropped_plc;
            lost.dropped_wireless += c.dropped_wireless;
            lost.unmatched += c.unmatched;
        }
        if (lost.dropped_plc + lost.dropped_wireless + lost.unmatched > 0)
            std::fprintf(stderr, "queue overflow: dropped %lld plc, %lld wireless, %lld unmatched frames\n",
                         lost.dropped_plc, lost.dropped_wireless, lost.unmatched);
    }
    return 0;
}

struct DumpOptions {
    std::string modulation = "bpsk";
    std::uint64_t seed = 1;
    int data_symbols = 40;
    std::string config;
    std::string out;
};

int cmd_frame_dump(const DumpOptions& o)
{
    PhyParams p;
    if (!o.config.empty()) p = load_params_file(o.config);
    p.modulation = parse_modulation(o.modulation);
    p.n_data_symbols = o.data_symbols;
    p = derive_params(p);
    const ConvCode code;
    const auto tx = build_frame(generate_bits(o.seed, info_bits_per_frame(p, code)), p, code, make_preamble(p));
    write_frame_dump(tx.samples, o.out);
    std::fprintf(stderr, "%zu samples, %zu info bits, digest %016llx\n", tx.samples.samples.size(),
                 tx.info.bits.size(), static_cast<unsigned long long>(tx.digest));
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-link (powerline + wireless) OFDM BER simulator"};
    app.require_subcommand(1);

    RunOptions run;
    auto* sub_run = app.add_subcommand("run", "Run a BER sweep and write CSV");
    sub_run->add_option("--scenario", run.scenario, "link-down | equal-sweep | fixed-wireless-sweep | custom")
        ->capture_default_str();
    sub_run->add_option("--modulation", run.modulation, "bpsk | dbpsk")->capture_default_str();
    sub_run->add_option("--ebn0-plc", run.ebn0_plc, "PLC Eb/N0 in dB: list, start:stop:step, fixed:X or down");
    sub_run->add_option("--ebn0-wireless", run.ebn0_wireless, "wireless Eb/N0 in dB, same forms");
    sub_run->add_option("--knowledge", run.knowledge, "comma list of perfect, estimated")->capture_default_str();
    sub_run->add_option("--seed", run.seed, "master seed")->capture_default_str();
    sub_run->add_option("--min-bits", run.min_bits, "minimum information bits per point (>= 10000)")
        ->capture_default_str();
    sub_run->add_option("--min-errors", run.min_errors, "keep going until every curve has this many errors")
        ->capture_default_str();
    sub_run->add_option("--max-bits", run.max_bits, "hard cap on information bits per point")->capture_default_str();
    sub_run->add_option("--data-symbols", run.data_symbols, "OFDM data symbols per frame")->capture_default_str();
    sub_run->add_option("--out", run.out, "CSV output path (stdout when omitted)");
    sub_run->add_flag("--realtime", run.realtime, "pace frames at the frame period (pipelined, drop-oldest)");
    sub_run->add_flag("--common-noise", run.common_noise, "reuse payload and noise streams at every sweep point");
    sub_run->add_option("--config", run.config, "PHY parameter file (key = value)");
    sub_run->add_option("--noise-mode", run.noise_mode, "instantaneous | avg-time | avg-time-freq")
        ->capture_default_str();
    sub_run->add_option("--timing-advance", run.timing_advance, "samples to back off the detected frame start")
        ->capture_default_str();
    sub_run->add_option("--manual-timing", run.manual_timing, "fixed frame start in samples, skipping detection");
    sub_run->add_option("--dbpsk-metric", run.dbpsk_metric, "noise-aware | high-snr")->capture_default_str();
    sub_run->add_option("--combining", run.combining, "mrc | selection | equal-gain")->capture_default_str();
    sub_run->add_option("--mode", run.mode, "serial | parallel | pipelined")->capture_default_str();
    sub_run->add_option("--batch", run.batch, "frames per batch between stopping checks")->capture_default_str();
    sub_run->add_option("--diag", run.diag, "per-frame diagnostics CSV");
    sub_run->add_flag("--quiet", run.quiet, "no summary on stderr");

    DumpOptions dump;
    auto* sub_dump = app.add_subcommand("frame-dump", "Write one transmitted frame as raw float64 I/Q");
    sub_dump->add_option("--modulation", dump.modulation, "bpsk | dbpsk")->capture_default_str();
    sub_dump->add_option("--seed", dump.seed, "payload seed")->capture_default_str();
    sub_dump->add_option("--data-symbols", dump.data_symbols, "OFDM data symbols per frame")->capture_default_str();
    sub_dump->add_option("--config", dump.config, "PHY parameter file (key = value)");
    sub_dump->add_option("--out", dump.out, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sub_run) return cmd_run(run);
        return cmd_frame_dump(dump);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error (%s): %s\n", e.field().c_str(), e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
}
