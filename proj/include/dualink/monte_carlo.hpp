#pragma once

// Frame-batch kernels for Monte-Carlo runs. The OpenMP kernel must produce
// exactly the outcomes of the serial reference for the same batch.

#include <vector>

#include "dualink/combiner.hpp"
#include "dualink/frame_pipeline.hpp"

namespace dualink {

struct LinkTrackers {
    explicit LinkTrackers(const ReceiverSettings& rx)
        : plc(rx.noise_mode, rx.noise_alpha), wireless(rx.noise_mode, rx.noise_alpha) {}
    NoiseTracker& of(Link link) { return link == Link::Plc ? plc : wireless; }

    NoiseTracker plc;
    NoiseTracker wireless;
};

/// Frames [first, first + count), each taken end to end before the next.
std::vector<FrameOutcome> simulate_frames_serial(const LinkSimulation& sim, LinkTrackers& trackers,
                                                 long long first, int count,
                                                 CombiningScheme scheme = CombiningScheme::Mrc);

/// Same frames in three passes: receiver fronts in parallel, noise trackers
/// in frame order, then LLRs and decoding in parallel.
std::vector<FrameOutcome> simulate_frames_omp(const LinkSimulation& sim, LinkTrackers& trackers,
                                              long long first, int count,
                                              CombiningScheme scheme = CombiningScheme::Mrc);

}  // namespace dualink
