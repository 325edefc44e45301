#pragma once

// Per-link receiver: preamble timing detection, FFT demodulation, LS
// channel estimation, preamble-based noise estimation and LLR demapping.

#include <optional>
#include <span>
#include <vector>

#include "dualink/ofdm_tx.hpp"
#include "dualink/phy_types.hpp"

namespace dualink {

inline constexpr int kDefaultTimingAdvance = 8;
inline constexpr double kDefaultNoiseAlpha = 0.1;

struct TimingResult {
    int detected_offset = 0;
    int applied_offset = 0;
    double correlation_peak = 0.0;
};

/// Cross-correlates the known preamble symbol against a capture. The
/// per-symbol correlations are summed coherently over the preamble
/// repetitions, which is the same as correlating against the whole known
/// preamble; without that sum the nine identical symbols give nine equal
/// peaks.
class TimingDetector {
public:
    TimingDetector(const Preamble& preamble, const PhyParams& params);

    /// With `manual`, applied_offset = *manual and no search is done.
    /// Otherwise detected_offset is the first lag maximising |corr| over
    /// lags that keep a whole frame inside the capture, and applied_offset
    /// = max(detected_offset - advance, 0).
    TimingResult detect(const SampleBlock& capture, int advance, std::optional<int> manual = {}) const;

    /// |corr| at every candidate lag; serial reference kept for tests.
    std::vector<double> correlation_profile(const SampleBlock& capture) const;

private:
    int search_span(std::size_t capture_len) const;
    double correlate_at(const cplx* capture, int lag) const;

    std::vector<double> template_;
    int frame_len_ = 0;
};

TimingResult detect_timing(const SampleBlock& capture, const Preamble& preamble, const PhyParams& params,
                           int advance = kDefaultTimingAdvance, std::optional<int> manual = {});

/// FFT of every symbol of the frame starting at timing.applied_offset,
/// CP stripped, active subcarriers only. Rows: preamble then data.
FrequencySymbols demodulate(const SampleBlock& capture, const TimingResult& timing, const PhyParams& params);

/// h[k] = mean_i rx[i,k] / known[k] over the received preamble rows.
std::vector<cplx> estimate_channel_ls(const FrequencySymbols& rx_preamble, std::span<const cplx> known);

enum class NoiseMode { Instantaneous, AvgTime, AvgTimeFreq };
std::string to_string(NoiseMode m);
NoiseMode parse_noise_mode(const std::string& s);

/// Successive identical preamble symbols cancel the signal:
/// s[i,k] = |rx[i+1,k] - rx[i,k]|^2 / 2 estimates the per-subcarrier noise
/// variance. `first_pair` is s[0,k]; `pair_mean` averages all pairs.
struct PreambleNoiseStats {
    std::vector<double> first_pair;
    std::vector<double> pair_mean;
};
PreambleNoiseStats preamble_noise_stats(const FrequencySymbols& rx_preamble);

struct NoiseEstimate {
    std::vector<double> per_sc;
    double scalar = 0.0;
};

/// Single-frame estimate (no cross-frame history).
NoiseEstimate estimate_noise(const FrequencySymbols& rx_preamble, NoiseMode mode);

/// Cross-frame noise averaging for one link. AvgTime smooths the
/// per-subcarrier pair means and AvgTimeFreq the frequency-averaged
/// scalar, each as est = (1 - alpha) est + alpha x after a first frame
/// that initialises est = x. Instantaneous keeps no history.
class NoiseTracker {
public:
    explicit NoiseTracker(NoiseMode mode = NoiseMode::AvgTimeFreq, double alpha = kDefaultNoiseAlpha);

    NoiseEstimate update(const PreambleNoiseStats& stats);
    NoiseMode mode() const { return mode_; }
    long long frames_seen() const { return frames_; }

private:
    NoiseMode mode_;
    double alpha_;
    long long frames_ = 0;
    std::vector<double> per_sc_;
    double scalar_ = 0.0;
};

/// Receiver-side knowledge about one link for one frame.
LinkEstimates make_estimates(std::vector<cplx> h_hat, const NoiseEstimate& noise, double code_rate);

/// Perfect-knowledge estimates from the true response and noise variance
/// per subcarrier (time-domain sigma2 / fft_size).
LinkEstimates perfect_estimates(std::vector<cplx> h_true, double sigma2_per_sc, double code_rate);

/// DBPSK LLR form.
///  - HighSnr:    2 Re(Y_n conj(Y_{n-1})) / sigma2
///  - NoiseAware: 2 S Re(Y_n conj(Y_{n-1})) / (S sigma2 + sigma2^2 / 2),
///    which keeps the noise x noise term of the differential product in the
///    variance. Equal to HighSnr when S >> sigma2. S is |H_k|^2 when the
///    estimates are exact; otherwise the frame's mean data power minus the
///    mean noise estimate, so the metric never touches the channel
///    estimate (the channel is flat across the band).
enum class DbpskMetric { NoiseAware, HighSnr };

/// BPSK: llr = 4 Re(Y conj(H)) / sigma2_k. DBPSK: see DbpskMetric; the
/// first data row is referenced to `dbpsk_reference` (the last received
/// preamble row). sigma2 is clamped below at 1e-12 x mean received power.
LlrVector demap_llr(const FrequencySymbols& rx_data, std::span<const cplx> dbpsk_reference,
                    const LinkEstimates& est, Modulation modulation,
                    DbpskMetric dbpsk_metric = DbpskMetric::NoiseAware);

/// Y / h per subcarrier.
FrequencySymbols equalize_zf(const FrequencySymbols& rx, std::span<const cplx> h_hat);

/// RMS error vector magnitude of ZF-equalised symbols against `reference`
/// (unit-power constellation). +inf when any h is zero.
double evm_rms(const FrequencySymbols& rx, std::span<const cplx> h_hat, const FrequencySymbols& reference);

}  // namespace dualink
