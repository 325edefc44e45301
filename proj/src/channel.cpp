#include "dualink/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

namespace dualink {

double ebn0_to_noise_sigma2(double ebn0_db, const PhyParams& params, const ConvCode& code)
{
    const double snr_per_sc = std::pow(10.0, ebn0_db / 10.0) * code.rate().value();
    return params.fft_size / snr_per_sc;
}

double link_noise_sigma2(const ChannelConfig& cfg, const PhyParams& params, const ConvCode& code)
{
    return ebn0_to_noise_sigma2(cfg.ebn0_db.value_or(0.0), params, code);
}

SampleBlock apply_channel(const SampleBlock& tx, const ChannelConfig& cfg, double noise_sigma2,
                          std::uint64_t noise_seed)
{
    const auto h = cfg.impulse_response();
    if (cfg.delay_samples < 0 || cfg.capture_margin < 0)
        throw std::invalid_argument("apply_channel: delay and margin must be non-negative");
    if (cfg.delay_samples + static_cast<int>(h.size()) - 1 > cfg.capture_margin)
        throw std::invalid_argument("apply_channel: delay exceeds the capture margin");
    if (noise_sigma2 < 0.0) throw std::invalid_argument("apply_channel: negative noise variance");

    SampleBlock rx;
    rx.sample_rate_hz = tx.sample_rate_hz;
    rx.samples.assign(tx.size() + cfg.capture_margin, cplx{});

    if (!cfg.down()) {
        for (std::size_t m = 0; m < h.size(); ++m) {
            cplx* dst = rx.samples.data() + cfg.delay_samples + m;
            for (std::size_t t = 0; t < tx.size(); ++t) dst[t] += h[m] * tx.samples[t];
        }
    }

    if (noise_sigma2 > 0.0) {
        std::mt19937_64 rng(noise_seed);
        boost::random::normal_distribution<double> normal(0.0, std::sqrt(noise_sigma2 / 2.0));
        for (auto& z : rx.samples) {
            const double re = normal(rng);
            const double im = normal(rng);
            z += cplx(re, im);
        }
    }
    return rx;
}

SampleBlock apply_channel(const SampleBlock& tx, const ChannelConfig& cfg, const PhyParams& params,
                          const ConvCode& code, std::uint64_t noise_seed)
{
    return apply_channel(tx, cfg, link_noise_sigma2(cfg, params, code), noise_seed);
}

std::vector<cplx> channel_response(const ChannelConfig& cfg, const PhyParams& params, int window_lag)
{
    std::vector<cplx> H(params.active_subcarriers.size());
    if (cfg.down()) return H;
    const auto h = cfg.impulse_response();
    for (std::size_t i = 0; i < H.size(); ++i) {
        const double k = params.active_subcarriers[i];
        cplx acc{};
        for (std::size_t m = 0; m < h.size(); ++m) {
            const double phase = -2.0 * std::numbers::pi * k * double(window_lag + int(m)) / params.fft_size;
            acc += h[m] * std::polar(1.0, phase);
        }
        H[i] = acc;
    }
    return H;
}

}  // namespace dualink
