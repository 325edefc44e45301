#include "dualink/combiner.hpp"

#include <cmath>
#include <cstdlib>

namespace dualink {

std::string to_string(CombiningScheme s)
{
    switch (s) {
    case CombiningScheme::Mrc: return "mrc";
    case CombiningScheme::Selection: return "selection";
    case CombiningScheme::EqualGain: return "equal-gain";
    }
    return "?";
}

CombiningScheme parse_combining(const std::string& s)
{
    for (auto c : {CombiningScheme::Mrc, CombiningScheme::Selection, CombiningScheme::EqualGain})
        if (s == to_string(c)) return c;
    throw ConfigError("combining", "unknown combining scheme '" + s + "'");
}

namespace {

void check_pair(const LlrVector& p, const LlrVector& w)
{
    if (p.llrs.size() != w.llrs.size()) throw std::invalid_argument("combine: LLR vectors differ in length");
    if (p.frame_index != w.frame_index)
        throw FrameMismatchError("combine: frame index " + std::to_string(p.frame_index) + " vs " +
                                 std::to_string(w.frame_index));
    if (p.payload_digest != w.payload_digest)
        throw FrameMismatchError("combine: frames " + std::to_string(p.frame_index) +
                                 " carry different payloads");
}

LlrVector like(const LlrVector& src)
{
    LlrVector out;
    out.frame_index = src.frame_index;
    out.payload_digest = src.payload_digest;
    return out;
}

double mean_abs(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return v.empty() ? 0.0 : s / double(v.size());
}

}  // namespace

LlrVector combine_mrc(const LlrVector& llr_p, const LlrVector& llr_w)
{
    check_pair(llr_p, llr_w);
    LlrVector out = like(llr_p);
    out.llrs.resize(llr_p.llrs.size());
    for (std::size_t i = 0; i < out.llrs.size(); ++i) out.llrs[i] = llr_p.llrs[i] + llr_w.llrs[i];
    return out;
}

LlrVector combine_selection(const LlrVector& llr_p, const LlrVector& llr_w, double ebn0_p_db, double ebn0_w_db)
{
    check_pair(llr_p, llr_w);
    return ebn0_w_db > ebn0_p_db ? llr_w : llr_p;
}

LlrVector combine_equal_gain(const LlrVector& llr_p, const LlrVector& llr_w)
{
    check_pair(llr_p, llr_w);
    const double sp = mean_abs(llr_p.llrs);
    const double sw = mean_abs(llr_w.llrs);
    LlrVector out = like(llr_p);
    out.llrs.resize(llr_p.llrs.size());
    for (std::size_t i = 0; i < out.llrs.size(); ++i)
        out.llrs[i] = (sp > 0 ? llr_p.llrs[i] / sp : 0.0) + (sw > 0 ? llr_w.llrs[i] / sw : 0.0);
    return out;
}

namespace {

long long count_errors(const std::vector<std::uint8_t>& decoded, const std::vector<std::uint8_t>& truth)
{
    long long e = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) e += decoded[i] != truth[i];
    return e;
}

}  // namespace

FrameOutcome decode_frame_pair(const LinkFrame& plc, const LinkFrame& wireless, const ConvCode& code,
                               CombiningScheme scheme)
{
    if (plc.frame_index != wireless.frame_index)
        throw FrameMismatchError("decode_frame_pair: frame index mismatch");
    if (plc.payload_digest != wireless.payload_digest || !plc.info_bits)
        throw FrameMismatchError("decode_frame_pair: frames carry different payloads");
    if (plc.knowledge != wireless.knowledge || plc.llrs.size() != plc.knowledge.size() ||
        wireless.llrs.size() != wireless.knowledge.size())
        throw std::invalid_argument("decode_frame_pair: links disagree on knowledge modes");

    const auto& truth = *plc.info_bits;
    const auto bits = static_cast<long long>(truth.size());
    FrameOutcome out;
    out.frame_index = plc.frame_index;
    out.tallies.reserve(plc.knowledge.size() * 3);
    for (std::size_t m = 0; m < plc.knowledge.size(); ++m) {
        const auto& lp = plc.llrs[m];
        const auto& lw = wireless.llrs[m];
        LlrVector combined;
        switch (scheme) {
        case CombiningScheme::Mrc: combined = combine_mrc(lp, lw); break;
        case CombiningScheme::Selection:
            combined = combine_selection(lp, lw, plc.ebn0_est_db[m], wireless.ebn0_est_db[m]);
            break;
        case CombiningScheme::EqualGain: combined = combine_equal_gain(lp, lw); break;
        }
        const Knowledge k = plc.knowledge[m];
        out.tallies.push_back({Link::Plc, k, bits, count_errors(viterbi_decode(lp, code).bits, truth)});
        out.tallies.push_back({Link::Wireless, k, bits, count_errors(viterbi_decode(lw, code).bits, truth)});
        out.tallies.push_back({Link::Combined, k, bits, count_errors(viterbi_decode(combined, code).bits, truth)});
    }
    for (const LinkFrame* f : {&plc, &wireless})
        out.diagnostics.push_back({f->link, f->timing.detected_offset, f->timing.applied_offset,
                                   f->measured_ebn0_db, f->evm});
    return out;
}

FrameQueue::FrameQueue(std::size_t depth, OverflowPolicy policy) : depth_(depth), policy_(policy)
{
    if (depth == 0) throw std::invalid_argument("FrameQueue: depth must be positive");
}

bool FrameQueue::push(LinkFrame frame)
{
    std::unique_lock lock(mu_);
    if (policy_ == OverflowPolicy::Block)
        not_full_.wait(lock, [&] { return closed_ || items_.size() < depth_; });
    if (closed_) return false;
    if (items_.size() >= depth_) {
        items_.pop_front();
        ++dropped_;
    }
    items_.push_back(std::move(frame));
    not_empty_.notify_one();
    return true;
}

std::optional<LinkFrame> FrameQueue::pop()
{
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    LinkFrame f = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return f;
}

void FrameQueue::close()
{
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
}

long long FrameQueue::dropped() const
{
    std::lock_guard lock(mu_);
    return dropped_;
}

std::size_t FrameQueue::size() const
{
    std::lock_guard lock(mu_);
    return items_.size();
}

CombinerStats combiner_loop(FrameQueue& queue_p, FrameQueue& queue_w, const ConvCode& code,
                            const std::function<bool(const FrameOutcome&)>& sink, CombiningScheme scheme)
{
    CombinerStats stats;
    auto finish = [&] {
        queue_p.close();
        queue_w.close();
        stats.dropped_plc = queue_p.dropped();
        stats.dropped_wireless = queue_w.dropped();
    };
    const auto max_skew = static_cast<long long>(std::max(queue_p.depth(), queue_w.depth()));

    try {
        auto p = queue_p.pop();
        auto w = queue_w.pop();
        while (p && w) {
            if (p->frame_index == w->frame_index) {
                const bool more = sink(decode_frame_pair(*p, *w, code, scheme));
                ++stats.combined;
                if (!more) break;
                p = queue_p.pop();
                w = queue_w.pop();
                continue;
            }
            if (std::llabs(p->frame_index - w->frame_index) > max_skew)
                throw DesyncError("combiner: frame index skew " + std::to_string(p->frame_index) + " vs " +
                                  std::to_string(w->frame_index) + " exceeds queue depth");
            ++stats.unmatched;
            if (p->frame_index < w->frame_index)
                p = queue_p.pop();
            else
                w = queue_w.pop();
        }
    } catch (...) {
        finish();
        throw;
    }
    finish();
    return stats;
}

}  // namespace dualink
