#pragma once

// Link emulation: complex gain (or short impulse response), integer delay,
// circular complex AWGN, and a link-down mode in which the transmitter is
// silent and the receiver captures noise only.
//
// Eb/N0 accounting: Eb is the energy per information bit on the active
// subcarriers, excluding cyclic prefix and preamble overhead, referenced to
// a unit-gain channel. With the forward FFT scaled by 1/N, a unit
// constellation point and complex time-domain noise of variance sigma2, the
// per-subcarrier SNR is N / sigma2 = (Eb/N0) * code_rate.

#include <cstdint>
#include <optional>
#include <vector>

#include "dualink/fec.hpp"
#include "dualink/phy_types.hpp"

namespace dualink {

struct ChannelConfig {
    cplx gain{1.0, 0.0};
    /// Optional impulse response; when non-empty it replaces `gain`, with
    /// taps[0] arriving at delay_samples.
    std::vector<cplx> taps;
    int delay_samples = 0;
    /// Absent means the link is down.
    std::optional<double> ebn0_db = 0.0;
    int capture_margin = 128;

    bool down() const { return !ebn0_db.has_value(); }
    std::vector<cplx> impulse_response() const { return taps.empty() ? std::vector<cplx>{gain} : taps; }
};

/// Time-domain complex noise variance for the given Eb/N0. +inf -> 0.
double ebn0_to_noise_sigma2(double ebn0_db, const PhyParams& params, const ConvCode& code);

/// Noise variance the link's receiver sees: the Eb/N0 level, or for a down
/// link the floor corresponding to 0 dB.
double link_noise_sigma2(const ChannelConfig& cfg, const PhyParams& params, const ConvCode& code);

/// capture = h * tx delayed by delay_samples, plus noise of variance
/// `noise_sigma2` on every sample; length tx.size() + capture_margin.
/// Throws std::invalid_argument when the delayed response overruns the margin.
SampleBlock apply_channel(const SampleBlock& tx, const ChannelConfig& cfg, double noise_sigma2,
                          std::uint64_t noise_seed);

SampleBlock apply_channel(const SampleBlock& tx, const ChannelConfig& cfg, const PhyParams& params,
                          const ConvCode& code, std::uint64_t noise_seed);

/// True per-active-subcarrier response seen by an FFT window that starts
/// `window_lag` samples before the ideal CP boundary (window_lag =
/// delay_samples - applied timing offset). Zero for a down link.
std::vector<cplx> channel_response(const ChannelConfig& cfg, const PhyParams& params, int window_lag);

}  // namespace dualink
