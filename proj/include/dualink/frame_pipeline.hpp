#pragma once

// One frame through one link, split at the only cross-frame dependency
// (the noise tracker) so frames can be processed out of order:
//
//   receive_front()  transmit -> channel -> timing -> FFT -> LS estimate
//   NoiseTracker     per-link, strictly in frame order
//   finish_link()    LLRs for every knowledge mode

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dualink/channel.hpp"
#include "dualink/combiner.hpp"
#include "dualink/fec.hpp"
#include "dualink/ofdm_rx.hpp"
#include "dualink/ofdm_tx.hpp"

namespace dualink {

struct ReceiverSettings {
    int timing_advance = kDefaultTimingAdvance;
    std::optional<int> manual_timing;
    NoiseMode noise_mode = NoiseMode::AvgTimeFreq;
    double noise_alpha = kDefaultNoiseAlpha;
    DbpskMetric dbpsk_metric = DbpskMetric::NoiseAware;
};

/// Immutable setup of one operating point, shared by every frame.
class LinkSimulation {
public:
    LinkSimulation(PhyParams params, ConvCode code, ChannelConfig plc, ChannelConfig wireless,
                   ReceiverSettings rx, std::vector<Knowledge> knowledge, std::uint64_t point_seed);

    const PhyParams& params() const { return params_; }
    const ConvCode& code() const { return code_; }
    const ReceiverSettings& receiver() const { return rx_; }
    const std::vector<Knowledge>& knowledge() const { return knowledge_; }
    const ChannelConfig& channel(Link link) const { return link == Link::Plc ? plc_ : wireless_; }
    long long info_bits_per_frame() const { return info_bits_; }

    std::uint64_t payload_seed(long long frame_index) const;
    std::uint64_t noise_seed(long long frame_index, Link link) const;

    TxFrame transmit(long long frame_index) const;

    struct Front {
        TimingResult timing;
        FrequencySymbols symbols;  // preamble rows then data rows
        std::vector<cplx> h_ls;
        PreambleNoiseStats noise_stats;
    };
    Front receive_front(const TxFrame& tx, long long frame_index, Link link) const;

    LinkFrame finish_link(const TxFrame& tx, long long frame_index, Link link, const Front& front,
                          const NoiseEstimate& noise) const;

private:
    PhyParams params_;
    ConvCode code_;
    ChannelConfig plc_, wireless_;
    ReceiverSettings rx_;
    std::vector<Knowledge> knowledge_;
    std::uint64_t point_seed_;
    Preamble preamble_;
    TimingDetector detector_;
    long long info_bits_;
};

}  // namespace dualink
