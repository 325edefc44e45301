#pragma once

// Frame construction: 9 identical preamble symbols followed by the coded
// payload, one (D)BPSK symbol per active subcarrier per OFDM symbol.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dualink/fec.hpp"
#include "dualink/phy_types.hpp"

namespace dualink {

inline constexpr std::uint64_t kPreambleSeed = 0x1901'2a5e'ed00'0001ULL;

struct Preamble {
    std::vector<cplx> freq_symbol;  // one +-1 value per active subcarrier
    int n_repeats = 9;
};

/// Fixed pseudo-random BPSK pattern on the active subcarriers.
Preamble make_preamble(const PhyParams& params, std::uint64_t seed = kPreambleSeed);

/// BPSK: 0 -> +1, 1 -> -1. DBPSK: per subcarrier, symbol n is symbol n-1
/// times (+1 for 0, -1 for 1), with row -1 given by `reference`.
/// `coded_bits` is laid out symbol-major (all subcarriers of symbol 0 first).
FrequencySymbols map_symbols(std::span<const std::uint8_t> coded_bits, Modulation modulation,
                             int n_data_symbols, std::span<const cplx> reference);

/// Time-domain OFDM symbol (cp_len + fft_size samples) whose spectrum
/// carries `active` on the active bins and the conjugate mirror image on
/// bins fft_size - k, so the waveform is real.
std::vector<cplx> modulate_symbol(std::span<const cplx> active, const PhyParams& params);

struct TxFrame {
    BitSequence info;
    std::vector<std::uint8_t> coded;
    FrequencySymbols data;  // mapped data symbols, n_data_symbols x n_active
    SampleBlock samples;
    std::uint64_t digest = 0;
};

/// Number of information bits that exactly fill one frame.
long long info_bits_per_frame(const PhyParams& params, const ConvCode& code);

TxFrame build_frame(BitSequence info_bits, const PhyParams& params, const ConvCode& code,
                    const Preamble& preamble);

inline SampleBlock assemble_frame(const BitSequence& info_bits, const PhyParams& params,
                                  const ConvCode& code, const Preamble& preamble)
{
    return build_frame(info_bits, params, code, preamble).samples;
}

/// Time-domain waveform of the preamble alone (n_repeats symbols with CP).
std::vector<double> preamble_waveform(const Preamble& preamble, const PhyParams& params);

/// Raw dump: each sample as little-endian float64 I then float64 Q.
void write_frame_dump(const SampleBlock& block, const std::filesystem::path& path);
SampleBlock read_frame_dump(const std::filesystem::path& path, double sample_rate_hz);

}  // namespace dualink
