#pragma once

#include <span>

#include "dualink/phy_types.hpp"

namespace dualink::fft {

// Scaling convention used project-wide: forward divides by N, inverse is
// the plain sum. A unit constellation point placed on bin k by inverse()
// comes back as exactly that point from forward().

/// out[k] = (1/N) sum_t in[t] e^{-j 2 pi k t / N}
void forward(std::span<const cplx> in, std::span<cplx> out);

/// out[t] = sum_k in[k] e^{+j 2 pi k t / N}
void inverse(std::span<const cplx> in, std::span<cplx> out);

}  // namespace dualink::fft
