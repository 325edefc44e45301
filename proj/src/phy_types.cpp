#include "dualink/phy_types.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dualink {

std::string to_string(Modulation m) { return m == Modulation::Bpsk ? "bpsk" : "dbpsk"; }

std::string to_string(Link l)
{
    switch (l) {
    case Link::Plc: return "plc";
    case Link::Wireless: return "wireless";
    case Link::Combined: return "combined";
    }
    return "?";
}

std::string to_string(Knowledge k) { return k == Knowledge::Perfect ? "perfect" : "estimated"; }

std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::LinkDown: return "link-down";
    case Scenario::EqualSweep: return "equal-sweep";
    case Scenario::FixedWirelessSweep: return "fixed-wireless-sweep";
    case Scenario::Custom: return "custom";
    }
    return "?";
}

Modulation parse_modulation(const std::string& s)
{
    if (s == "bpsk" || s == "BPSK") return Modulation::Bpsk;
    if (s == "dbpsk" || s == "DBPSK") return Modulation::Dbpsk;
    throw ConfigError("modulation", "expected bpsk or dbpsk, got '" + s + "'");
}

Knowledge parse_knowledge(const std::string& s)
{
    if (s == "perfect") return Knowledge::Perfect;
    if (s == "estimated") return Knowledge::Estimated;
    throw ConfigError("knowledge", "expected perfect or estimated, got '" + s + "'");
}

Scenario parse_scenario(const std::string& s)
{
    for (auto sc : {Scenario::LinkDown, Scenario::EqualSweep, Scenario::FixedWirelessSweep, Scenario::Custom})
        if (s == to_string(sc)) return sc;
    throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

std::vector<int> PhyParams::default_active_subcarriers()
{
    std::vector<int> idx;
    for (int k = 23; k <= 58; ++k) idx.push_back(k);
    return idx;
}

PhyParams derive_params(PhyParams p)
{
    if (!(p.sample_rate_hz > 0.0) || !std::isfinite(p.sample_rate_hz))
        throw ConfigError("sample_rate_hz", "must be positive");
    if (p.fft_size < 4)
        throw ConfigError("fft_size", "must be at least 4");
    if (p.cp_len < 0 || p.cp_len >= p.fft_size)
        throw ConfigError("cp_len", "must satisfy 0 <= cp_len < fft_size");
    if (p.n_preamble_symbols < 2)
        throw ConfigError("n_preamble_symbols", "at least two identical preamble symbols are required");
    if (p.active_subcarriers.empty())
        throw ConfigError("active_subcarriers", "must not be empty");
    for (std::size_t i = 0; i < p.active_subcarriers.size(); ++i) {
        const int k = p.active_subcarriers[i];
        if (k < 1 || k > p.fft_size / 2 - 1)
            throw ConfigError("active_subcarriers", "index " + std::to_string(k) + " outside [1, fft_size/2 - 1]");
        if (i > 0 && k <= p.active_subcarriers[i - 1])
            throw ConfigError("active_subcarriers", "indices must be strictly increasing");
    }
    if (p.n_data_symbols < 1)
        throw ConfigError("n_data_symbols", "must be at least 1");
    if (p.code_rate.num <= 0 || p.code_rate.den <= 0 || p.code_rate.num > p.code_rate.den)
        throw ConfigError("code_rate", "must be a rational in (0, 1]");
    if (!(p.frame_period_s > 0.0))
        throw ConfigError("frame_period_s", "must be positive");

    p.symbol_len = p.fft_size + p.cp_len;
    p.subcarrier_spacing_hz = p.sample_rate_hz / p.fft_size;

    const double frame_duration = double(p.frame_len()) / p.sample_rate_hz;
    if (frame_duration >= p.frame_period_s)
        throw ConfigError("n_data_symbols", "frame does not fit within frame_period_s");
    return p;
}

BitSequence generate_bits(std::uint64_t seed, long long n_bits)
{
    if (n_bits <= 0) throw std::invalid_argument("generate_bits: n_bits must be positive");
    BitSequence out;
    out.seed = seed;
    out.bits.resize(static_cast<std::size_t>(n_bits));
    std::mt19937_64 rng(seed);
    std::uint64_t word = 0;
    for (long long i = 0; i < n_bits; ++i) {
        if (i % 64 == 0) word = rng();
        out.bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(word & 1u);
        word >>= 1;
    }
    return out;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = splitmix64(master);
    for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    return h;
}

std::uint64_t payload_digest(const std::vector<std::uint8_t>& bits)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bits) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    h ^= bits.size();
    h *= 0x100000001b3ULL;
    return h;
}

bool SampleBlock::all_finite() const
{
    return std::all_of(samples.begin(), samples.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

FrequencySymbols FrequencySymbols::slice(int first, int count) const
{
    if (first < 0 || count < 0 || first + count > rows_)
        throw std::out_of_range("FrequencySymbols::slice: row range out of bounds");
    FrequencySymbols out(count, cols_);
    std::copy(row(first), row(first) + std::size_t(count) * cols_, out.row(0));
    return out;
}

}  // namespace dualink
