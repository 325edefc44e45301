#include "dualink/frame_pipeline.hpp"

namespace dualink {

namespace {
constexpr std::uint64_t kPayloadTag = 0x7061796c6f6164ULL;  // "payload"
constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;        // "noise"
}  // namespace

LinkSimulation::LinkSimulation(PhyParams params, ConvCode code, ChannelConfig plc, ChannelConfig wireless,
                               ReceiverSettings rx, std::vector<Knowledge> knowledge, std::uint64_t point_seed)
    : params_(derive_params(std::move(params))),
      code_(std::move(code)),
      plc_(std::move(plc)),
      wireless_(std::move(wireless)),
      rx_(rx),
      knowledge_(std::move(knowledge)),
      point_seed_(point_seed),
      preamble_(make_preamble(params_)),
      detector_(preamble_, params_),
      info_bits_(dualink::info_bits_per_frame(params_, code_))
{
    code_.validate();
    if (params_.code_rate != code_.rate())
        throw ConfigError("code_rate", "does not match the convolutional code");
}

std::uint64_t LinkSimulation::payload_seed(long long frame_index) const
{
    return derive_seed(point_seed_, {kPayloadTag, static_cast<std::uint64_t>(frame_index)});
}

std::uint64_t LinkSimulation::noise_seed(long long frame_index, Link link) const
{
    return derive_seed(point_seed_, {kNoiseTag, static_cast<std::uint64_t>(link), static_cast<std::uint64_t>(frame_index)});
}

TxFrame LinkSimulation::transmit(long long frame_index) const
{
    return build_frame(generate_bits(payload_seed(frame_index), info_bits_), params_, code_, preamble_);
}

LinkSimulation::Front LinkSimulation::receive_front(const TxFrame& tx, long long frame_index, Link link) const
{
    const auto& cfg = channel(link);
    const auto capture = apply_channel(tx.samples, cfg, params_, code_, noise_seed(frame_index, link));

    Front f;
    f.timing = detector_.detect(capture, rx_.timing_advance, rx_.manual_timing);
    f.symbols = demodulate(capture, f.timing, params_);
    const auto rx_pre = f.symbols.slice(0, params_.n_preamble_symbols);
    f.h_ls = estimate_channel_ls(rx_pre, preamble_.freq_symbol);
    f.noise_stats = preamble_noise_stats(rx_pre);
    return f;
}

LinkFrame LinkSimulation::finish_link(const TxFrame& tx, long long frame_index, Link link, const Front& front,
                                      const NoiseEstimate& noise) const
{
    const auto& cfg = channel(link);
    const int n_pre = params_.n_preamble_symbols;
    const double rate = code_.rate().value();
    const auto rx_data = front.symbols.slice(n_pre, params_.n_data_symbols);
    const std::span<const cplx> reference(front.symbols.row(n_pre - 1), params_.n_active());

    const LinkEstimates estimated = make_estimates(front.h_ls, noise, rate);

    LinkFrame out;
    out.link = link;
    out.frame_index = frame_index;
    out.payload_digest = tx.digest;
    out.info_bits = std::make_shared<const std::vector<std::uint8_t>>(tx.info.bits);
    out.timing = front.timing;
    out.measured_ebn0_db = estimated.ebn0_est_db;
    out.evm = evm_rms(rx_data, front.h_ls, tx.data);

    for (Knowledge k : knowledge_) {
        LinkEstimates est;
        if (k == Knowledge::Estimated) {
            est = estimated;
        } else {
            const int lag = cfg.delay_samples - front.timing.applied_offset;
            est = perfect_estimates(channel_response(cfg, params_, lag),
                                    link_noise_sigma2(cfg, params_, code_) / params_.fft_size, rate);
        }
        LlrVector llr = demap_llr(rx_data, reference, est, params_.modulation, rx_.dbpsk_metric);
        llr.frame_index = frame_index;
        llr.payload_digest = tx.digest;
        out.knowledge.push_back(k);
        out.llrs.push_back(std::move(llr));
        out.ebn0_est_db.push_back(est.ebn0_est_db);
    }
    return out;
}

}  // namespace dualink
