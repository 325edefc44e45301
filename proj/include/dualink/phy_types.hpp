#pragma once

// Shared domain types for the dual-link (powerline + wireless) OFDM simulator.

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualink {

using cplx = std::complex<double>;

enum class Modulation { Bpsk, Dbpsk };
enum class Link { Plc, Wireless, Combined };
enum class Knowledge { Perfect, Estimated };

std::string to_string(Modulation m);
std::string to_string(Link l);
std::string to_string(Knowledge k);
Modulation parse_modulation(const std::string& s);
Knowledge parse_knowledge(const std::string& s);

/// Raised when a configuration value violates a PHY invariant. `field()`
/// names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Rational {
    int num = 1;
    int den = 2;
    double value() const { return static_cast<double>(num) / den; }
    bool operator==(const Rational&) const = default;
};

/// Transceiver constants shared by both links. Raw fields are user
/// supplied; `symbol_len` and `subcarrier_spacing_hz` are filled in by
/// derive_params().
struct PhyParams {
    double sample_rate_hz = 400'000.0;
    int fft_size = 256;
    int cp_len = 64;
    int n_preamble_symbols = 9;
    std::vector<int> active_subcarriers = default_active_subcarriers();
    int n_data_symbols = 40;
    Modulation modulation = Modulation::Bpsk;
    Rational code_rate{1, 2};
    double frame_period_s = 0.4;

    // derived
    int symbol_len = 0;
    double subcarrier_spacing_hz = 0.0;

    /// CENELEC A: 35.9375 kHz .. 90.625 kHz at 1562.5 Hz spacing -> bins 23..58.
    static std::vector<int> default_active_subcarriers();

    int n_active() const { return static_cast<int>(active_subcarriers.size()); }
    int n_symbols() const { return n_preamble_symbols + n_data_symbols; }
    int frame_len() const { return n_symbols() * (fft_size + cp_len); }
    int coded_bits_per_frame() const { return n_data_symbols * n_active(); }
    double frames_per_second() const { return 1.0 / frame_period_s; }

    bool operator==(const PhyParams&) const = default;
};

/// Validates every invariant and fills the derived fields. Idempotent.
/// Throws ConfigError naming the first offending field.
PhyParams derive_params(PhyParams base);

struct BitSequence {
    std::vector<std::uint8_t> bits;
    std::uint64_t seed = 0;
};

/// Deterministic pseudo-random bits; identical for identical seeds.
/// Throws std::invalid_argument when n_bits <= 0.
BitSequence generate_bits(std::uint64_t seed, long long n_bits);

/// Mixes a master seed with stream tags into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

/// FNV-1a digest of a bit sequence; identifies a payload across links.
std::uint64_t payload_digest(const std::vector<std::uint8_t>& bits);

struct SampleBlock {
    std::vector<cplx> samples;
    double sample_rate_hz = 400'000.0;

    std::size_t size() const { return samples.size(); }
    bool all_finite() const;
};

/// Row-major [n_symbols x n_active] matrix of per-subcarrier values.
class FrequencySymbols {
public:
    FrequencySymbols() = default;
    FrequencySymbols(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    cplx& at(int n, int k) { return data_[std::size_t(n) * cols_ + k]; }
    const cplx& at(int n, int k) const { return data_[std::size_t(n) * cols_ + k]; }
    cplx* row(int n) { return data_.data() + std::size_t(n) * cols_; }
    const cplx* row(int n) const { return data_.data() + std::size_t(n) * cols_; }
    const std::vector<cplx>& data() const { return data_; }

    /// Rows [first, first + count) as a new matrix.
    FrequencySymbols slice(int first, int count) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

struct LinkEstimates {
    std::vector<cplx> h_hat;
    std::vector<double> sigma2_per_sc;
    double sigma2_scalar = 0.0;
    double ebn0_est_db = 0.0;
    bool exact = false;  // true response and noise variance substituted
};

/// LLR = log P(bit=0) / P(bit=1); positive favours 0.
struct LlrVector {
    std::vector<double> llrs;
    long long frame_index = 0;
    std::uint64_t payload_digest = 0;
};

enum class Scenario { LinkDown, EqualSweep, FixedWirelessSweep, Custom };
std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

struct BerRecord {
    Scenario scenario = Scenario::Custom;
    Modulation modulation = Modulation::Bpsk;
    Link link = Link::Combined;
    std::optional<double> ebn0_plc_db;
    std::optional<double> ebn0_wireless_db;
    Knowledge knowledge = Knowledge::Perfect;
    long long bits_total = 0;
    long long bit_errors = 0;
    double ber = 0.0;
    std::uint64_t seed = 0;
};

}  // namespace dualink
