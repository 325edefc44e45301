#include <doctest.h>

#include <cmath>

#include "dualink/channel.hpp"
#include "dualink/fft.hpp"
#include "dualink/ofdm_rx.hpp"
#include "dualink/ofdm_tx.hpp"

using namespace dualink;

namespace {

const PhyParams kParams = derive_params(PhyParams{});
const ConvCode kCode;

TxFrame test_frame(std::uint64_t seed, const PhyParams& p = kParams)
{
    return build_frame(generate_bits(seed, info_bits_per_frame(p, kCode)), p, kCode, make_preamble(p));
}

ChannelConfig noiseless(cplx gain, int delay)
{
    ChannelConfig c;
    c.gain = gain;
    c.delay_samples = delay;
    c.ebn0_db = 300.0;
    return c;
}

}  // namespace

TEST_CASE("noise variance follows the Eb/N0 definition")
{
    const double s0 = ebn0_to_noise_sigma2(0.0, kParams, kCode);
    // sigma2 = N / (rate * 10^(x/10)) -> 256 / 0.5 at 0 dB
    CHECK(s0 == doctest::Approx(512.0));
    for (double x : {-6.0, 0.0, 4.5, 10.0})
        CHECK(ebn0_to_noise_sigma2(x, kParams, kCode) / ebn0_to_noise_sigma2(x + 3.0103, kParams, kCode) ==
              doctest::Approx(2.0).epsilon(1e-4));
    CHECK(ebn0_to_noise_sigma2(200.0, kParams, kCode) < 1e-15);
    double prev = 1e300;
    for (double x = -10; x <= 20; x += 0.5) {
        const double s = ebn0_to_noise_sigma2(x, kParams, kCode);
        CHECK(s < prev);
        prev = s;
    }

    ChannelConfig down;
    down.ebn0_db.reset();
    CHECK(link_noise_sigma2(down, kParams, kCode) == doctest::Approx(s0));
}

TEST_CASE("identity channel passes the frame through")
{
    const auto tx = test_frame(1);
    ChannelConfig c;
    c.capture_margin = 64;
    const auto rx = apply_channel(tx.samples, c, 0.0, 9);
    REQUIRE(rx.size() == tx.samples.size() + 64);
    for (std::size_t i = 0; i < tx.samples.size(); ++i) CHECK(rx.samples[i] == tx.samples.samples[i]);
    for (std::size_t i = tx.samples.size(); i < rx.size(); ++i) CHECK(rx.samples[i] == cplx{});
}

TEST_CASE("gain and delay")
{
    const auto tx = test_frame(2);
    const cplx g = std::polar(0.5, M_PI / 4);
    const auto rx = apply_channel(tx.samples, noiseless(g, 17), 0.0, 1);
    for (int i = 0; i < 17; ++i) CHECK(rx.samples[i] == cplx{});
    for (std::size_t i = 0; i < tx.samples.size(); ++i)
        CHECK(std::abs(rx.samples[i + 17] - g * tx.samples.samples[i]) < 1e-15);
}

TEST_CASE("noiseless channel is linear in the input")
{
    const auto tx = test_frame(3);
    SampleBlock scaled = tx.samples;
    const cplx a{-1.5, 0.25};
    for (auto& s : scaled.samples) s *= a;
    const auto cfg = noiseless(std::polar(0.8, 1.0), 5);
    const auto y1 = apply_channel(tx.samples, cfg, 0.0, 1);
    const auto y2 = apply_channel(scaled, cfg, 0.0, 1);
    for (std::size_t i = 0; i < y1.size(); ++i) CHECK(std::abs(y2.samples[i] - a * y1.samples[i]) < 1e-12);
}

TEST_CASE("multipath taps convolve")
{
    SampleBlock tx;
    tx.samples = {1.0, 0.0, 0.0, 2.0};
    ChannelConfig c;
    c.taps = {cplx{0.5, 0}, cplx{0, 0.25}};
    c.delay_samples = 1;
    c.capture_margin = 4;
    const auto y = apply_channel(tx, c, 0.0, 1);
    const std::vector<cplx> expect{0.0, 0.5, {0, 0.25}, 0.0, 1.0, {0, 0.5}, 0.0, 0.0};
    REQUIRE(y.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(y.samples[i] - expect[i]) < 1e-15);
}

TEST_CASE("delay must fit in the capture margin")
{
    const auto tx = test_frame(4);
    auto c = noiseless(1.0, 129);
    CHECK_THROWS_AS(apply_channel(tx.samples, c, 0.0, 1), std::invalid_argument);
    c.delay_samples = 128;
    CHECK_NOTHROW(apply_channel(tx.samples, c, 0.0, 1));
    c.taps = {1.0, 0.5};
    CHECK_THROWS_AS(apply_channel(tx.samples, c, 0.0, 1), std::invalid_argument);
}

TEST_CASE("noise is reproducible per seed and independent across seeds")
{
    SampleBlock zero;
    zero.samples.assign(20000, cplx{});
    ChannelConfig c;
    c.capture_margin = 0;
    const auto a = apply_channel(zero, c, 2.0, 100);
    const auto b = apply_channel(zero, c, 2.0, 100);
    const auto d = apply_channel(zero, c, 2.0, derive_seed(1, {2}));
    CHECK(a.samples == b.samples);

    double pa = 0, cross_re = 0, cross_im = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa += std::norm(a.samples[i]);
        const cplx x = a.samples[i] * std::conj(d.samples[i]);
        cross_re += x.real();
        cross_im += x.imag();
    }
    pa /= double(a.size());
    CHECK(pa == doctest::Approx(2.0).epsilon(0.03));
    // normalised cross-correlation ~ N(0, 1/sqrt(2n)) per component
    CHECK(std::abs(cross_re) / double(a.size()) / 2.0 < 0.03);
    CHECK(std::abs(cross_im) / double(a.size()) / 2.0 < 0.03);
}

TEST_CASE("a down link is the noise floor only")
{
    const auto tx = test_frame(5);
    ChannelConfig c;
    c.ebn0_db.reset();
    const auto rx = apply_channel(tx.samples, c, kParams, kCode, 77);
    const double floor = ebn0_to_noise_sigma2(0.0, kParams, kCode);
    double p = 0;
    for (const auto& s : rx.samples) p += std::norm(s);
    CHECK(p / double(rx.size()) == doctest::Approx(floor).epsilon(0.05));

    // same seed with the link up differs only by the signal
    ChannelConfig up;
    up.ebn0_db = 0.0;
    const auto rx_up = apply_channel(tx.samples, up, kParams, kCode, 77);
    for (std::size_t i = 0; i < tx.samples.size(); i += 997)
        CHECK(std::abs(rx_up.samples[i] - rx.samples[i] - tx.samples.samples[i]) < 1e-9);

    CHECK(channel_response(c, kParams, 0) == std::vector<cplx>(36, cplx{}));
}

TEST_CASE("post-FFT noise is flat circular Gaussian across subcarriers")
{
    // 10^5 noise-only symbols, 1000 per capture
    const int n = kParams.fft_size;
    const int per_block = 1000, blocks = 100;
    const double sigma2 = 3.0;
    std::vector<double> m2(n, 0.0), m4(n, 0.0), re2(n, 0.0);
    SampleBlock zero;
    zero.samples.assign(std::size_t(per_block) * n, cplx{});
    ChannelConfig c;
    c.capture_margin = 0;
    std::vector<cplx> spec(n);
    for (int b = 0; b < blocks; ++b) {
        const auto rx = apply_channel(zero, c, sigma2, derive_seed(42, {std::uint64_t(b)}));
        for (int s = 0; s < per_block; ++s) {
            fft::forward(std::span<const cplx>(rx.samples.data() + std::size_t(s) * n, n), spec);
            for (int k = 0; k < n; ++k) {
                const double e = std::norm(spec[k]);
                m2[k] += e;
                m4[k] += e * e;
                re2[k] += spec[k].real() * spec[k].real();
            }
        }
    }
    const double count = double(per_block) * blocks;
    const double expect = sigma2 / n;
    for (int k : kParams.active_subcarriers) {
        const double v = m2[k] / count;
        CHECK(v == doctest::Approx(expect).epsilon(0.03));
        // E|z|^4 = 2 (E|z|^2)^2 for circular complex Gaussian z
        CHECK(m4[k] / count / (v * v) == doctest::Approx(2.0).epsilon(0.03));
        CHECK(re2[k] / count == doctest::Approx(expect / 2).epsilon(0.03));
    }
}

TEST_CASE("per-subcarrier SNR at 0 dB Eb/N0 equals the code rate")
{
    const auto pre = make_preamble(kParams);
    ChannelConfig c;
    c.gain = std::polar(1.0, 0.3);
    c.delay_samples = 11;
    c.ebn0_db = 0.0;
    double sig = 0, noise = 0;
    const int frames = 30;
    for (int f = 0; f < frames; ++f) {
        const auto tx = test_frame(100 + f);
        const auto rx = apply_channel(tx.samples, c, kParams, kCode, derive_seed(9, {std::uint64_t(f)}));
        TimingResult t;
        t.applied_offset = t.detected_offset = 11;
        const auto sym = demodulate(rx, t, kParams);
        const auto h = channel_response(c, kParams, 0);
        for (int n = 0; n < kParams.n_data_symbols; ++n)
            for (int k = 0; k < kParams.n_active(); ++k) {
                const cplx x = tx.data.at(n, k);
                sig += std::norm(h[k] * x);
                noise += std::norm(sym.at(kParams.n_preamble_symbols + n, k) - h[k] * x);
            }
    }
    CHECK(sig / noise == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("channel response includes the window lag phase ramp")
{
    ChannelConfig c;
    c.gain = std::polar(2.0, 0.5);
    const auto h0 = channel_response(c, kParams, 0);
    const auto h3 = channel_response(c, kParams, 3);
    for (int i = 0; i < kParams.n_active(); ++i) {
        const int k = kParams.active_subcarriers[i];
        CHECK(std::abs(h0[i] - c.gain) < 1e-14);
        CHECK(std::abs(h3[i] - c.gain * std::polar(1.0, -2 * M_PI * k * 3 / 256.0)) < 1e-12);
    }
}
