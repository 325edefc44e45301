#include "dualink/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace dualink {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ConfigError(key, "cannot parse '" + text + "' as a number");
    return value;
}

std::vector<int> parse_indices(const std::string& key, const std::string& text)
{
    std::vector<int> out;
    if (auto pos = text.find(".."); pos != std::string::npos) {
        const int lo = parse_number<int>(key, trim(text.substr(0, pos)));
        const int hi = parse_number<int>(key, trim(text.substr(pos + 2)));
        if (hi < lo) throw ConfigError(key, "empty range '" + text + "'");
        for (int k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number<int>(key, trim(item)));
    return out;
}

Rational parse_rational(const std::string& key, const std::string& text)
{
    const auto pos = text.find('/');
    if (pos == std::string::npos) throw ConfigError(key, "expected num/den, got '" + text + "'");
    return {parse_number<int>(key, trim(text.substr(0, pos))), parse_number<int>(key, trim(text.substr(pos + 1)))};
}

}  // namespace

PhyParams load_params(std::istream& in)
{
    PhyParams p;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("line {}", lineno), "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError(key, "specified more than once");

        if (key == "sample_rate_hz") p.sample_rate_hz = parse_number<double>(key, value);
        else if (key == "fft_size") p.fft_size = parse_number<int>(key, value);
        else if (key == "cp_len") p.cp_len = parse_number<int>(key, value);
        else if (key == "n_preamble_symbols") p.n_preamble_symbols = parse_number<int>(key, value);
        else if (key == "active_subcarriers") p.active_subcarriers = parse_indices(key, value);
        else if (key == "n_data_symbols") p.n_data_symbols = parse_number<int>(key, value);
        else if (key == "modulation") p.modulation = parse_modulation(value);
        else if (key == "code_rate") p.code_rate = parse_rational(key, value);
        else if (key == "frame_period_s") p.frame_period_s = parse_number<double>(key, value);
        else throw ConfigError(key, "unknown key");
    }
    return derive_params(std::move(p));
}

PhyParams load_params_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    return load_params(in);
}

std::string to_config_text(const PhyParams& p)
{
    std::string idx;
    for (std::size_t i = 0; i < p.active_subcarriers.size(); ++i)
        idx += (i ? "," : "") + std::to_string(p.active_subcarriers[i]);
    return fmt::format(
        "sample_rate_hz = {}\nfft_size = {}\ncp_len = {}\nn_preamble_symbols = {}\n"
        "active_subcarriers = {}\nn_data_symbols = {}\nmodulation = {}\ncode_rate = {}/{}\n"
        "frame_period_s = {}\n",
        p.sample_rate_hz, p.fft_size, p.cp_len, p.n_preamble_symbols, idx, p.n_data_symbols,
        to_string(p.modulation), p.code_rate.num, p.code_rate.den, p.frame_period_s);
}

}  // namespace dualink
