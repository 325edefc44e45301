#include "dualink/ofdm_rx.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dualink/fft.hpp"

namespace dualink {

TimingDetector::TimingDetector(const Preamble& preamble, const PhyParams& params)
    : template_(preamble_waveform(preamble, params)), frame_len_(params.frame_len())
{
}

int TimingDetector::search_span(std::size_t capture_len) const
{
    const auto cap = static_cast<long long>(capture_len);
    if (cap < static_cast<long long>(template_.size()))
        throw std::invalid_argument("detect_timing: capture shorter than the preamble");
    // Keep a whole frame inside the capture whenever the capture allows it.
    const long long span = cap >= frame_len_ ? cap - frame_len_ : cap - static_cast<long long>(template_.size());
    return static_cast<int>(span) + 1;
}

double TimingDetector::correlate_at(const cplx* capture, int lag) const
{
    const auto* x = reinterpret_cast<const double*>(capture + lag);
    const double* w = template_.data();
    const std::size_t n = template_.size();
    double re = 0.0, im = 0.0;
#pragma omp simd reduction(+ : re, im)
    for (std::size_t t = 0; t < n; ++t) {
        re += x[2 * t] * w[t];
        im += x[2 * t + 1] * w[t];
    }
    return std::hypot(re, im);
}

std::vector<double> TimingDetector::correlation_profile(const SampleBlock& capture) const
{
    const int span = search_span(capture.size());
    std::vector<double> out(span);
    for (int lag = 0; lag < span; ++lag) out[lag] = correlate_at(capture.samples.data(), lag);
    return out;
}

TimingResult TimingDetector::detect(const SampleBlock& capture, int advance, std::optional<int> manual) const
{
    if (advance < 0) throw std::invalid_argument("detect_timing: negative timing advance");
    if (manual) {
        if (*manual < 0) throw std::invalid_argument("detect_timing: manual offset must be non-negative");
        return {*manual, *manual, 0.0};
    }
    const int span = search_span(capture.size());
    TimingResult r;
    r.correlation_peak = -1.0;
    for (int lag = 0; lag < span; ++lag) {
        const double c = correlate_at(capture.samples.data(), lag);
        if (c > r.correlation_peak) {
            r.correlation_peak = c;
            r.detected_offset = lag;
        }
    }
    r.applied_offset = std::max(r.detected_offset - advance, 0);
    return r;
}

TimingResult detect_timing(const SampleBlock& capture, const Preamble& preamble, const PhyParams& params,
                           int advance, std::optional<int> manual)
{
    return TimingDetector(preamble, params).detect(capture, advance, manual);
}

FrequencySymbols demodulate(const SampleBlock& capture, const TimingResult& timing, const PhyParams& params)
{
    const int N = params.fft_size;
    const int sym_len = N + params.cp_len;
    if (timing.applied_offset < 0 ||
        static_cast<long long>(timing.applied_offset) + params.frame_len() > static_cast<long long>(capture.size()))
        throw std::invalid_argument("demodulate: FFT windows overrun the capture");

    FrequencySymbols out(params.n_symbols(), params.n_active());
    std::vector<cplx> bins(N);
    for (int n = 0; n < params.n_symbols(); ++n) {
        const std::size_t start = std::size_t(timing.applied_offset) + std::size_t(n) * sym_len + params.cp_len;
        fft::forward(std::span<const cplx>(capture.samples.data() + start, N), bins);
        for (int i = 0; i < params.n_active(); ++i) out.at(n, i) = bins[params.active_subcarriers[i]];
    }
    return out;
}

std::vector<cplx> estimate_channel_ls(const FrequencySymbols& rx_preamble, std::span<const cplx> known)
{
    if (rx_preamble.rows() == 0 || std::size_t(rx_preamble.cols()) != known.size())
        throw std::invalid_argument("estimate_channel_ls: dimension mismatch");
    std::vector<cplx> h(known.size());
    for (int i = 0; i < rx_preamble.rows(); ++i)
        for (int k = 0; k < rx_preamble.cols(); ++k) h[k] += rx_preamble.at(i, k) / known[k];
    for (auto& v : h) v /= double(rx_preamble.rows());
    return h;
}

std::string to_string(NoiseMode m)
{
    switch (m) {
    case NoiseMode::Instantaneous: return "instantaneous";
    case NoiseMode::AvgTime: return "avg-time";
    case NoiseMode::AvgTimeFreq: return "avg-time-freq";
    }
    return "?";
}

NoiseMode parse_noise_mode(const std::string& s)
{
    for (auto m : {NoiseMode::Instantaneous, NoiseMode::AvgTime, NoiseMode::AvgTimeFreq})
        if (s == to_string(m)) return m;
    throw ConfigError("noise_mode", "unknown noise mode '" + s + "'");
}

PreambleNoiseStats preamble_noise_stats(const FrequencySymbols& rx_preamble)
{
    if (rx_preamble.rows() < 2)
        throw std::invalid_argument("estimate_noise: at least two identical preamble symbols are required");
    const int n_sc = rx_preamble.cols();
    const int pairs = rx_preamble.rows() - 1;
    PreambleNoiseStats s;
    s.first_pair.resize(n_sc);
    s.pair_mean.assign(n_sc, 0.0);
    for (int i = 0; i < pairs; ++i) {
        for (int k = 0; k < n_sc; ++k) {
            const double d = std::norm(rx_preamble.at(i + 1, k) - rx_preamble.at(i, k)) / 2.0;
            if (i == 0) s.first_pair[k] = d;
            s.pair_mean[k] += d;
        }
    }
    for (auto& v : s.pair_mean) v /= pairs;
    return s;
}

namespace {
double mean_of(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}
}  // namespace

NoiseEstimate estimate_noise(const FrequencySymbols& rx_preamble, NoiseMode mode)
{
    NoiseTracker tracker(mode);
    return tracker.update(preamble_noise_stats(rx_preamble));
}

NoiseTracker::NoiseTracker(NoiseMode mode, double alpha) : mode_(mode), alpha_(alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("noise_alpha", "must be in (0, 1]");
}

NoiseEstimate NoiseTracker::update(const PreambleNoiseStats& stats)
{
    NoiseEstimate out;
    switch (mode_) {
    case NoiseMode::Instantaneous:
        out.per_sc = stats.first_pair;
        out.scalar = mean_of(out.per_sc);
        break;
    case NoiseMode::AvgTime:
        if (frames_ == 0 || per_sc_.size() != stats.pair_mean.size()) {
            per_sc_ = stats.pair_mean;
        } else {
            for (std::size_t k = 0; k < per_sc_.size(); ++k)
                per_sc_[k] = (1.0 - alpha_) * per_sc_[k] + alpha_ * stats.pair_mean[k];
        }
        out.per_sc = per_sc_;
        out.scalar = mean_of(out.per_sc);
        break;
    case NoiseMode::AvgTimeFreq: {
        const double x = mean_of(stats.pair_mean);
        scalar_ = frames_ == 0 ? x : (1.0 - alpha_) * scalar_ + alpha_ * x;
        out.scalar = scalar_;
        out.per_sc.assign(stats.pair_mean.size(), scalar_);
        break;
    }
    }
    ++frames_;
    return out;
}

namespace {
double ebn0_db_from(const std::vector<cplx>& h, double sigma2, double code_rate)
{
    double p = 0.0;
    for (const auto& v : h) p += std::norm(v);
    p /= std::max<std::size_t>(h.size(), 1);
    if (sigma2 <= 0.0) return std::numeric_limits<double>::infinity();
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(p / sigma2 / code_rate);
}
}  // namespace

LinkEstimates make_estimates(std::vector<cplx> h_hat, const NoiseEstimate& noise, double code_rate)
{
    if (noise.per_sc.size() != h_hat.size()) throw std::invalid_argument("make_estimates: dimension mismatch");
    LinkEstimates e;
    e.sigma2_per_sc = noise.per_sc;
    e.sigma2_scalar = noise.scalar;
    e.ebn0_est_db = ebn0_db_from(h_hat, noise.scalar, code_rate);
    e.h_hat = std::move(h_hat);
    return e;
}

LinkEstimates perfect_estimates(std::vector<cplx> h_true, double sigma2_per_sc, double code_rate)
{
    NoiseEstimate n;
    n.per_sc.assign(h_true.size(), sigma2_per_sc);
    n.scalar = sigma2_per_sc;
    auto e = make_estimates(std::move(h_true), n, code_rate);
    e.exact = true;
    return e;
}

LlrVector demap_llr(const FrequencySymbols& rx_data, std::span<const cplx> dbpsk_reference,
                    const LinkEstimates& est, Modulation modulation, DbpskMetric dbpsk_metric)
{
    const int n_sc = rx_data.cols();
    if (est.h_hat.size() != std::size_t(n_sc) || est.sigma2_per_sc.size() != std::size_t(n_sc))
        throw std::invalid_argument("demap_llr: estimate dimensions do not match the received symbols");
    if (modulation == Modulation::Dbpsk && dbpsk_reference.size() != std::size_t(n_sc))
        throw std::invalid_argument("demap_llr: DBPSK reference row has the wrong length");

    double power = 0.0;
    for (const auto& y : rx_data.data()) power += std::norm(y);
    power /= std::max<std::size_t>(rx_data.data().size(), 1);
    const double sigma2_min = std::max(1e-12 * power, DBL_MIN);

    std::vector<double> sigma2(n_sc), weight(n_sc);
    for (int k = 0; k < n_sc; ++k) sigma2[k] = std::max(est.sigma2_per_sc[k], sigma2_min);

    if (modulation == Modulation::Bpsk) {
        for (int k = 0; k < n_sc; ++k) weight[k] = 4.0 / sigma2[k];
    } else if (dbpsk_metric == DbpskMetric::HighSnr) {
        for (int k = 0; k < n_sc; ++k) weight[k] = 2.0 / sigma2[k];
    } else {
        double mean_sigma2 = 0.0;
        for (double v : sigma2) mean_sigma2 += v;
        mean_sigma2 /= std::max(n_sc, 1);
        const double s_frame = std::max(power - mean_sigma2, 0.0);
        for (int k = 0; k < n_sc; ++k) {
            const double s = est.exact ? std::norm(est.h_hat[k]) : s_frame;
            weight[k] = 2.0 * s / (s * sigma2[k] + 0.5 * sigma2[k] * sigma2[k]);
        }
    }

    LlrVector out;
    out.llrs.resize(std::size_t(rx_data.rows()) * n_sc);
    for (int n = 0; n < rx_data.rows(); ++n) {
        const cplx* y = rx_data.row(n);
        const cplx* prev = n == 0 ? dbpsk_reference.data() : rx_data.row(n - 1);
        double* llr = out.llrs.data() + std::size_t(n) * n_sc;
        for (int k = 0; k < n_sc; ++k) {
            const cplx ref = modulation == Modulation::Bpsk ? est.h_hat[k] : prev[k];
            llr[k] = weight[k] * (y[k] * std::conj(ref)).real();
        }
    }
    return out;
}

FrequencySymbols equalize_zf(const FrequencySymbols& rx, std::span<const cplx> h_hat)
{
    if (std::size_t(rx.cols()) != h_hat.size()) throw std::invalid_argument("equalize_zf: dimension mismatch");
    FrequencySymbols out(rx.rows(), rx.cols());
    for (int n = 0; n < rx.rows(); ++n)
        for (int k = 0; k < rx.cols(); ++k) out.at(n, k) = rx.at(n, k) / h_hat[k];
    return out;
}

double evm_rms(const FrequencySymbols& rx, std::span<const cplx> h_hat, const FrequencySymbols& reference)
{
    if (rx.rows() != reference.rows() || rx.cols() != reference.cols())
        throw std::invalid_argument("evm_rms: dimension mismatch");
    if (std::any_of(h_hat.begin(), h_hat.end(), [](const cplx& h) { return h == cplx{}; }))
        return std::numeric_limits<double>::infinity();
    const auto eq = equalize_zf(rx, h_hat);
    double err = 0.0;
    for (std::size_t i = 0; i < eq.data().size(); ++i) err += std::norm(eq.data()[i] - reference.data()[i]);
    return std::sqrt(err / std::max<std::size_t>(eq.data().size(), 1));
}

}  // namespace dualink
