#pragma once

// LLR-domain diversity combining of the powerline and wireless links, and
// the combining thread: two bounded FIFO queues (one per link producer)
// drained by a single consumer that matches frames by index, checks the
// payload digest, combines and decodes.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dualink/fec.hpp"
#include "dualink/ofdm_rx.hpp"
#include "dualink/phy_types.hpp"

namespace dualink {

class FrameMismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DesyncError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class CombiningScheme { Mrc, Selection, EqualGain };
std::string to_string(CombiningScheme s);
CombiningScheme parse_combining(const std::string& s);

/// out[i] = p[i] + w[i]. Requires equal length (std::invalid_argument) and
/// equal frame index and payload digest (FrameMismatchError).
LlrVector combine_mrc(const LlrVector& llr_p, const LlrVector& llr_w);

/// Whole frame from the link with the higher estimated Eb/N0 (PLC on ties).
LlrVector combine_selection(const LlrVector& llr_p, const LlrVector& llr_w, double ebn0_p_db, double ebn0_w_db);

/// Each branch normalised to unit mean |llr| before summing, discarding
/// per-link reliability weighting.
LlrVector combine_equal_gain(const LlrVector& llr_p, const LlrVector& llr_w);

/// What one link pipeline forwards to the combiner for one frame: LLRs for
/// each knowledge mode plus the transmitted bits for BER counting.
struct LinkFrame {
    Link link = Link::Plc;
    long long frame_index = 0;
    std::uint64_t payload_digest = 0;
    std::shared_ptr<const std::vector<std::uint8_t>> info_bits;
    std::vector<Knowledge> knowledge;
    std::vector<LlrVector> llrs;      // parallel to `knowledge`
    std::vector<double> ebn0_est_db;  // parallel to `knowledge`
    TimingResult timing;
    double measured_ebn0_db = 0.0;  // from the receiver's own estimates
    double evm = 0.0;
};

struct LinkTally {
    Link link = Link::Plc;
    Knowledge knowledge = Knowledge::Perfect;
    long long bits = 0;
    long long errors = 0;
};

struct LinkDiagnostics {
    Link link = Link::Plc;
    int detected_offset = 0;
    int applied_offset = 0;
    double ebn0_est_db = 0.0;
    double evm = 0.0;
};

/// Per-frame result: for every knowledge mode exactly three tallies, in
/// the order PLC, Wireless, Combined; plus one diagnostics entry per link.
struct FrameOutcome {
    long long frame_index = 0;
    std::vector<LinkTally> tallies;
    std::vector<LinkDiagnostics> diagnostics;
};

FrameOutcome decode_frame_pair(const LinkFrame& plc, const LinkFrame& wireless, const ConvCode& code,
                               CombiningScheme scheme = CombiningScheme::Mrc);

enum class OverflowPolicy { DropOldest, Block };

/// Bounded FIFO of LinkFrames. Under DropOldest a push onto a full queue
/// evicts the oldest entry and counts it; under Block the producer waits.
class FrameQueue {
public:
    explicit FrameQueue(std::size_t depth = 16, OverflowPolicy policy = OverflowPolicy::DropOldest);

    /// False once the queue is closed; the frame is discarded.
    bool push(LinkFrame frame);
    /// Blocks until a frame is available; nullopt once closed and drained.
    std::optional<LinkFrame> pop();
    void close();

    std::size_t depth() const { return depth_; }
    long long dropped() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::condition_variable not_empty_, not_full_;
    std::deque<LinkFrame> items_;
    std::size_t depth_;
    OverflowPolicy policy_;
    long long dropped_ = 0;
    bool closed_ = false;
};

struct CombinerStats {
    long long combined = 0;
    long long unmatched = 0;
    long long dropped_plc = 0;
    long long dropped_wireless = 0;
};

/// Consumer side of the combining thread. Pops frames from both queues,
/// pairs them by frame_index (a frame whose partner was dropped is
/// discarded and counted as unmatched), decodes and hands each outcome to
/// `sink`. Returns when either queue is closed and drained or `sink`
/// returns false; both queues are closed on exit. An index skew larger
/// than the queue depth raises DesyncError.
CombinerStats combiner_loop(FrameQueue& queue_p, FrameQueue& queue_w, const ConvCode& code,
                            const std::function<bool(const FrameOutcome&)>& sink,
                            CombiningScheme scheme = CombiningScheme::Mrc);

}  // namespace dualink
