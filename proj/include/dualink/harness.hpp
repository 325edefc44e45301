#pragma once

// Scenario orchestration and Monte-Carlo BER sweeps.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dualink/combiner.hpp"
#include "dualink/fec.hpp"
#include "dualink/frame_pipeline.hpp"
#include "dualink/phy_types.hpp"

namespace dualink {

inline constexpr const char* kVersion = "dualink 0.1.0";

/// Eb/N0 of one link in dB; nullopt means the link is down.
using LinkLevel = std::optional<double>;

enum class ExecMode {
    Serial,     ///< reference: one frame at a time
    Parallel,   ///< OpenMP over frames within a batch
    Pipelined,  ///< producer thread per link + combining thread over FIFO queues
};
std::string to_string(ExecMode m);

struct LinkChannel {
    cplx gain{1.0, 0.0};
    int delay_samples = 0;
    std::vector<cplx> taps;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::EqualSweep;
    Modulation modulation = Modulation::Bpsk;
    std::vector<LinkLevel> ebn0_plc_db;
    std::vector<LinkLevel> ebn0_wireless_db;
    std::vector<Knowledge> knowledge{Knowledge::Perfect, Knowledge::Estimated};
    long long min_bits = 10'000;
    long long min_errors = 100;
    long long max_bits = 10'000'000;
    std::uint64_t seed = 1;
    int n_data_symbols = 40;
    bool realtime_pacing = false;
    /// Every sweep point reuses the same payload and noise streams (scaled
    /// to its own noise level), so differences between points are not
    /// swamped by Monte-Carlo noise. Off: each point draws its own streams.
    bool common_noise = false;

    PhyParams params;  // modulation and n_data_symbols above take precedence
    ConvCode code;
    ReceiverSettings receiver;
    CombiningScheme combining = CombiningScheme::Mrc;
    LinkChannel plc_channel{std::polar(1.0, 0.7), 17, {}};
    LinkChannel wireless_channel{std::polar(1.0, -1.9), 41, {}};
    int capture_margin = 128;
    int frames_per_batch = 32;
    std::size_t queue_depth = 16;
};

/// Sweep list from text: "down", "fixed:X", a range "start:stop:step"
/// (inclusive, stop included when reached within step/1000), or a comma
/// list mixing numbers and "down". Throws ConfigError(field).
std::vector<LinkLevel> parse_levels(const std::string& text, const std::string& field);

/// Default sweep grids: BPSK -6..8 dB, DBPSK -6..11 dB, step 1.
std::vector<LinkLevel> default_grid(Modulation m);

/// Fills empty sweep lists with the scenario's defaults: link-down uses PLC
/// 7.30 dB with the wireless link down, equal sweeps use default_grid(),
/// fixed-wireless sweeps hold the wireless link at 3 dB (BPSK) / 6 dB (DBPSK).
ScenarioConfig with_defaults(ScenarioConfig cfg);

/// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& cfg);

PhyParams effective_params(const ScenarioConfig& cfg);
ChannelConfig channel_config(const ScenarioConfig& cfg, Link link, LinkLevel level);

struct OperatingPoint {
    LinkLevel plc;
    LinkLevel wireless;
};

/// Grid in output order. Equal sweeps pair each PLC level with itself,
/// fixed-wireless sweeps pair each PLC level with the single wireless
/// level, link-down and custom take the cartesian product.
std::vector<OperatingPoint> sweep_points(const ScenarioConfig& cfg);

using OutcomeSink = std::function<void(const FrameOutcome&)>;

struct PointResult {
    /// |knowledge| x {PLC, Wireless, Combined}, knowledge-major.
    std::vector<BerRecord> records;
    long long frames = 0;
    CombinerStats combiner;
};

/// Simulates frames in batches of frames_per_batch until
/// bits >= min_bits and every record has >= min_errors errors, or bits
/// reach max_bits. Serial and Parallel give identical results; so does
/// Pipelined unless realtime pacing lets the queues overflow.
PointResult run_point(const ScenarioConfig& cfg, const OperatingPoint& point, int point_index,
                      ExecMode mode = ExecMode::Parallel, const OutcomeSink& sink = {});

struct ResultSet {
    ScenarioConfig config;
    std::vector<BerRecord> rows;
    std::string params_hash;
    /// Per sweep point, in sweep order.
    std::vector<CombinerStats> combiner;
};

ResultSet run_scenario(const ScenarioConfig& cfg, ExecMode mode = ExecMode::Parallel,
                       const OutcomeSink& sink = {});

/// 16 hex digits identifying the effective PHY, code, channel and receiver setup.
std::string params_hash(const ScenarioConfig& cfg);

/// '#'-prefixed metadata lines, then
/// scenario,modulation,knowledge,ebn0_plc_db,ebn0_wireless_db,link,bits_total,bit_errors,ber,seed
void write_csv(const ResultSet& results, std::ostream& os);
/// Throws IoError if the file cannot be written.
void write_csv_file(const ResultSet& results, const std::filesystem::path& path);

/// Per-frame diagnostics: frame_index,link,detected_offset,applied_offset,ebn0_est_db,evm
void write_diagnostics_header(std::ostream& os);
void write_diagnostics(const FrameOutcome& outcome, std::ostream& os);

struct CurvePoint {
    double ebn0_db = 0.0;
    long long bits = 0;
    long long errors = 0;
    double ber = 0.0;
};

/// Rows for one link and knowledge mode, keyed by the PLC Eb/N0 (or the
/// wireless Eb/N0 when the PLC link is down), in row order.
std::vector<CurvePoint> extract_curve(const std::vector<BerRecord>& rows, Link link, Knowledge knowledge);

/// Eb/N0 where the curve first falls through `target_ber`, interpolating
/// log10(BER) linearly between the bracketing points. nullopt when the
/// curve never crosses.
std::optional<double> ebn0_at_ber(const std::vector<CurvePoint>& curve, double target_ber);

/// Standard deviation of a binomial BER estimate, sqrt(p(1-p)/n).
double binomial_sigma(double ber, long long bits);

}  // namespace dualink
