#pragma once

// Convolutional coding with zero-tail termination and a soft-input Viterbi
// decoder. Default code: rate 1/2, K = 7, generators 171/133 (octal).

#include <cstdint>
#include <span>
#include <vector>

#include "dualink/phy_types.hpp"

namespace dualink {

enum class Termination { ZeroTail };

struct ConvCode {
    int constraint_length = 7;
    /// Octal-style tap masks; bit (K-1) taps the current input bit.
    std::vector<unsigned> generators{0171, 0133};
    Termination termination = Termination::ZeroTail;

    int n_outputs() const { return static_cast<int>(generators.size()); }
    int n_states() const { return 1 << (constraint_length - 1); }
    int tail_bits() const { return constraint_length - 1; }
    Rational rate() const { return {1, n_outputs()}; }

    /// Throws std::invalid_argument on an empty generator list, a
    /// polynomial wider than K bits, or K outside [2, 16].
    void validate() const;

    /// Coded length for `info_bits` information bits.
    long long coded_length(long long info_bits) const { return (info_bits + tail_bits()) * n_outputs(); }
    /// Information bits carried by `coded_bits` coded bits, or -1 when the
    /// count does not correspond to a whole terminated block.
    long long info_length(long long coded_bits) const;
};

/// Encoder starts in the all-zero state and is flushed back to it with
/// K-1 zero tail bits. Throws std::invalid_argument on empty input.
std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> bits, const ConvCode& code);

/// Maximum-likelihood information sequence under the correlation metric
/// sum_i llr[i] * (1 - 2 c[i]). Tail bits are stripped. Ties resolve
/// toward the predecessor whose dropped bit is 0.
std::vector<std::uint8_t> viterbi_decode(std::span<const double> llrs, const ConvCode& code);
BitSequence viterbi_decode(const LlrVector& llrs, const ConvCode& code);

/// Correlation metric of a coded sequence against LLRs.
double correlation_metric(std::span<const double> llrs, std::span<const std::uint8_t> coded);

/// +magnitude for 0, -magnitude for 1; hard-decision decoder input.
std::vector<double> hard_llrs(std::span<const std::uint8_t> coded, double magnitude = 1.0);

}  // namespace dualink
