#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dualink/config.hpp"
#include "dualink/harness.hpp"

namespace dualink {

namespace {

std::string level_text(const LinkLevel& l) { return l ? fmt::format("{:.2f}", *l) : std::string("down"); }

void describe_channel(std::ostream& os, const char* name, const LinkChannel& ch)
{
    os << name << "_gain = " << fmt::format("{:.17g},{:.17g}", ch.gain.real(), ch.gain.imag()) << '\n';
    os << name << "_delay = " << ch.delay_samples << '\n';
    os << name << "_taps =";
    for (const auto& t : ch.taps) os << fmt::format(" {:.17g},{:.17g}", t.real(), t.imag());
    os << '\n';
}

}  // namespace

std::string params_hash(const ScenarioConfig& cfg)
{
    // Everything except the sweep grid, seed and stopping rule: those are
    // visible in the rows themselves.
    std::ostringstream os;
    os << to_config_text(effective_params(cfg));
    os << "constraint_length = " << cfg.code.constraint_length << '\n';
    os << "generators =";
    for (auto g : cfg.code.generators) os << ' ' << g;
    os << '\n';
    describe_channel(os, "plc", cfg.plc_channel);
    describe_channel(os, "wireless", cfg.wireless_channel);
    os << "capture_margin = " << cfg.capture_margin << '\n';
    os << "timing_advance = " << cfg.receiver.timing_advance << '\n';
    os << "manual_timing = " << (cfg.receiver.manual_timing ? std::to_string(*cfg.receiver.manual_timing) : "auto")
       << '\n';
    os << "noise_mode = " << to_string(cfg.receiver.noise_mode) << '\n';
    os << "noise_alpha = " << fmt::format("{:.17g}", cfg.receiver.noise_alpha) << '\n';
    os << "dbpsk_metric = " << static_cast<int>(cfg.receiver.dbpsk_metric) << '\n';
    os << "combining = " << to_string(cfg.combining) << '\n';

    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

void write_csv(const ResultSet& rs, std::ostream& os)
{
    const auto& cfg = rs.config;
    fmt::print(os, "# {}\n", kVersion);
    fmt::print(os, "# params_hash={}\n", rs.params_hash);
    fmt::print(os, "# seed={} min_bits={} min_errors={} max_bits={} data_symbols={} combining={}{}\n", cfg.seed,
               cfg.min_bits, cfg.min_errors, cfg.max_bits, cfg.n_data_symbols, to_string(cfg.combining),
               cfg.common_noise ? " common_noise" : "");
    os << "scenario,modulation,knowledge,ebn0_plc_db,ebn0_wireless_db,link,bits_total,bit_errors,ber,seed\n";
    for (const auto& r : rs.rows)
        fmt::print(os, "{},{},{},{},{},{},{},{},{:.6e},{}\n", to_string(r.scenario), to_string(r.modulation),
                   to_string(r.knowledge), level_text(r.ebn0_plc_db), level_text(r.ebn0_wireless_db),
                   to_string(r.link), r.bits_total, r.bit_errors, r.ber, r.seed);
}

void write_csv_file(const ResultSet& rs, const std::filesystem::path& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(rs, f);
    f.flush();
    if (!f) throw IoError("write to '" + path.string() + "' failed");
}

void write_diagnostics_header(std::ostream& os)
{
    os << "frame_index,link,detected_offset,applied_offset,ebn0_est_db,evm\n";
}

void write_diagnostics(const FrameOutcome& o, std::ostream& os)
{
    for (const auto& d : o.diagnostics)
        fmt::print(os, "{},{},{},{},{:.4f},{:.5f}\n", o.frame_index, to_string(d.link), d.detected_offset,
                   d.applied_offset, d.ebn0_est_db, d.evm);
}

}  // namespace dualink
