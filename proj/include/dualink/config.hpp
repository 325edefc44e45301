#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dualink/phy_types.hpp"

namespace dualink {

/// Reads PhyParams from `key = value` lines. Blank lines and lines
/// starting with '#' are ignored; unknown or repeated keys raise
/// ConfigError. Keys not present keep their defaults. The result is
/// passed through derive_params().
///
///   fft_size = 256
///   active_subcarriers = 23..58     # or a comma list: 23,24,30
///   code_rate = 1/2
PhyParams load_params(std::istream& in);
PhyParams load_params_file(const std::filesystem::path& path);

/// Canonical text form; load_params(to_config_text(p)) == p.
std::string to_config_text(const PhyParams& p);

}  // namespace dualink
