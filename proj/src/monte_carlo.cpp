#include "dualink/monte_carlo.hpp"

#include <exception>

namespace dualink {

std::vector<FrameOutcome> simulate_frames_serial(const LinkSimulation& sim, LinkTrackers& trackers,
                                                 long long first, int count, CombiningScheme scheme)
{
    std::vector<FrameOutcome> out;
    out.reserve(count);
    for (long long f = first; f < first + count; ++f) {
        const TxFrame tx = sim.transmit(f);
        LinkFrame frames[2];
        for (Link link : {Link::Plc, Link::Wireless}) {
            const auto front = sim.receive_front(tx, f, link);
            const auto noise = trackers.of(link).update(front.noise_stats);
            frames[link == Link::Plc ? 0 : 1] = sim.finish_link(tx, f, link, front, noise);
        }
        out.push_back(decode_frame_pair(frames[0], frames[1], sim.code(), scheme));
    }
    return out;
}

std::vector<FrameOutcome> simulate_frames_omp(const LinkSimulation& sim, LinkTrackers& trackers,
                                              long long first, int count, CombiningScheme scheme)
{
    std::vector<TxFrame> tx(count);
    std::vector<LinkSimulation::Front> front_p(count), front_w(count);
    std::vector<NoiseEstimate> noise_p(count), noise_w(count);
    std::vector<FrameOutcome> out(count);
    std::exception_ptr error;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            tx[i] = sim.transmit(first + i);
            front_p[i] = sim.receive_front(tx[i], first + i, Link::Plc);
            front_w[i] = sim.receive_front(tx[i], first + i, Link::Wireless);
        } catch (...) {
#pragma omp critical(dualink_mc_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    for (int i = 0; i < count; ++i) {
        noise_p[i] = trackers.plc.update(front_p[i].noise_stats);
        noise_w[i] = trackers.wireless.update(front_w[i].noise_stats);
    }

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            const auto lp = sim.finish_link(tx[i], first + i, Link::Plc, front_p[i], noise_p[i]);
            const auto lw = sim.finish_link(tx[i], first + i, Link::Wireless, front_w[i], noise_w[i]);
            out[i] = decode_frame_pair(lp, lw, sim.code(), scheme);
        } catch (...) {
#pragma omp critical(dualink_mc_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace dualink
