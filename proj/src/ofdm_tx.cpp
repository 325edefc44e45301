#include "dualink/ofdm_tx.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <stdexcept>

#include "dualink/fft.hpp"

namespace dualink {

Preamble make_preamble(const PhyParams& params, std::uint64_t seed)
{
    const auto bits = generate_bits(seed, params.n_active());
    Preamble p;
    p.n_repeats = params.n_preamble_symbols;
    p.freq_symbol.reserve(bits.bits.size());
    for (auto b : bits.bits) p.freq_symbol.emplace_back(b ? -1.0 : 1.0, 0.0);
    return p;
}

FrequencySymbols map_symbols(std::span<const std::uint8_t> coded_bits, Modulation modulation,
                             int n_data_symbols, std::span<const cplx> reference)
{
    const int n_sc = static_cast<int>(reference.size());
    if (n_data_symbols <= 0 || n_sc == 0 || coded_bits.size() != std::size_t(n_data_symbols) * n_sc)
        throw std::invalid_argument("map_symbols: coded bit count must equal n_data_symbols x n_active");

    FrequencySymbols out(n_data_symbols, n_sc);
    for (int n = 0; n < n_data_symbols; ++n) {
        for (int k = 0; k < n_sc; ++k) {
            const double sign = coded_bits[std::size_t(n) * n_sc + k] ? -1.0 : 1.0;
            if (modulation == Modulation::Bpsk) {
                out.at(n, k) = sign;
            } else {
                const cplx prev = n == 0 ? reference[k] : out.at(n - 1, k);
                out.at(n, k) = prev * sign;
            }
        }
    }
    return out;
}

std::vector<cplx> modulate_symbol(std::span<const cplx> active, const PhyParams& params)
{
    if (active.size() != params.active_subcarriers.size())
        throw std::invalid_argument("modulate_symbol: one value per active subcarrier expected");
    const int N = params.fft_size;
    std::vector<cplx> spectrum(N), body(N);
    for (std::size_t i = 0; i < active.size(); ++i) {
        const int k = params.active_subcarriers[i];
        spectrum[k] = active[i];
        spectrum[N - k] = std::conj(active[i]);
    }
    fft::inverse(spectrum, body);

    std::vector<cplx> out(std::size_t(params.cp_len) + N);
    for (int t = 0; t < N; ++t) out[params.cp_len + t] = body[t].real();
    std::copy_n(out.begin() + N, params.cp_len, out.begin());
    return out;
}

long long info_bits_per_frame(const PhyParams& params, const ConvCode& code)
{
    const long long info = code.info_length(params.coded_bits_per_frame());
    if (info <= 0)
        throw ConfigError("n_data_symbols",
                          "coded bits per frame do not form a terminated block for this code");
    return info;
}

TxFrame build_frame(BitSequence info_bits, const PhyParams& params, const ConvCode& code,
                    const Preamble& preamble)
{
    if (static_cast<long long>(info_bits.bits.size()) != info_bits_per_frame(params, code))
        throw std::invalid_argument("build_frame: information bit count does not fill the frame");

    TxFrame f;
    f.coded = conv_encode(info_bits.bits, code);
    f.data = map_symbols(f.coded, params.modulation, params.n_data_symbols, preamble.freq_symbol);
    f.digest = payload_digest(info_bits.bits);
    f.info = std::move(info_bits);

    f.samples.sample_rate_hz = params.sample_rate_hz;
    f.samples.samples.reserve(std::size_t(params.frame_len()));
    const auto pre = modulate_symbol(preamble.freq_symbol, params);
    for (int i = 0; i < preamble.n_repeats; ++i)
        f.samples.samples.insert(f.samples.samples.end(), pre.begin(), pre.end());
    for (int n = 0; n < params.n_data_symbols; ++n) {
        const auto sym = modulate_symbol(std::span<const cplx>(f.data.row(n), f.data.cols()), params);
        f.samples.samples.insert(f.samples.samples.end(), sym.begin(), sym.end());
    }
    return f;
}

std::vector<double> preamble_waveform(const Preamble& preamble, const PhyParams& params)
{
    const auto sym = modulate_symbol(preamble.freq_symbol, params);
    std::vector<double> out;
    out.reserve(sym.size() * preamble.n_repeats);
    for (int i = 0; i < preamble.n_repeats; ++i)
        for (const auto& z : sym) out.push_back(z.real());
    return out;
}

namespace {

void put_le(std::ostream& os, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(buf, 8);
}

double get_le(const unsigned char* p)
{
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void write_frame_dump(const SampleBlock& block, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    for (const auto& z : block.samples) {
        put_le(os, z.real());
        put_le(os, z.imag());
    }
    if (!os) throw IoError("write to '" + path.string() + "' failed");
}

SampleBlock read_frame_dump(const std::filesystem::path& path, double sample_rate_hz)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (raw.size() % 16 != 0) throw IoError("'" + path.string() + "' is not a whole number of I/Q pairs");
    SampleBlock out;
    out.sample_rate_hz = sample_rate_hz;
    out.samples.reserve(raw.size() / 16);
    for (std::size_t i = 0; i < raw.size(); i += 16)
        out.samples.emplace_back(get_le(raw.data() + i), get_le(raw.data() + i + 8));
    return out;
}

}  // namespace dualink
