#include "dualink/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "dualink/config.hpp"
#include "dualink/monte_carlo.hpp"

namespace dualink {

std::string to_string(ExecMode m)
{
    switch (m) {
    case ExecMode::Serial: return "serial";
    case ExecMode::Parallel: return "parallel";
    case ExecMode::Pipelined: return "pipelined";
    }
    return "?";
}

namespace {

double parse_number(const std::string& s, const std::string& field)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw ConfigError(field, "not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) return parts;
        start = pos + 1;
    }
}

}  // namespace

std::vector<LinkLevel> parse_levels(const std::string& text, const std::string& field)
{
    if (text.empty()) throw ConfigError(field, "empty level list");
    if (text == "down") return {std::nullopt};
    if (text.rfind("fixed:", 0) == 0) return {parse_number(text.substr(6), field)};

    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError(field, "range must be start:stop:step");
        const double a = parse_number(parts[0], field);
        const double b = parse_number(parts[1], field);
        const double step = parse_number(parts[2], field);
        if (step <= 0.0) throw ConfigError(field, "range step must be positive");
        if (b < a) throw ConfigError(field, "range stop is below start");
        const long long n = static_cast<long long>(std::floor((b - a) / step + 1e-3)) + 1;
        if (n > 10'000) throw ConfigError(field, "range has too many points");
        std::vector<LinkLevel> out;
        // Rounded to 1e-9 so 0.1-style steps print cleanly.
        for (long long i = 0; i < n; ++i) out.emplace_back(std::round((a + double(i) * step) * 1e9) / 1e9);
        return out;
    }

    std::vector<LinkLevel> out;
    for (const auto& item : split(text, ',')) {
        if (item == "down")
            out.emplace_back(std::nullopt);
        else
            out.emplace_back(parse_number(item, field));
    }
    return out;
}

std::vector<LinkLevel> default_grid(Modulation m)
{
    const int hi = m == Modulation::Bpsk ? 8 : 11;
    std::vector<LinkLevel> g;
    for (int x = -6; x <= hi; ++x) g.emplace_back(double(x));
    return g;
}

ScenarioConfig with_defaults(ScenarioConfig cfg)
{
    switch (cfg.scenario) {
    case Scenario::LinkDown:
        if (cfg.ebn0_plc_db.empty()) cfg.ebn0_plc_db = {7.30};
        if (cfg.ebn0_wireless_db.empty()) cfg.ebn0_wireless_db = {std::nullopt};
        break;
    case Scenario::EqualSweep:
        if (cfg.ebn0_plc_db.empty()) cfg.ebn0_plc_db = default_grid(cfg.modulation);
        break;
    case Scenario::FixedWirelessSweep:
        if (cfg.ebn0_plc_db.empty()) cfg.ebn0_plc_db = default_grid(cfg.modulation);
        if (cfg.ebn0_wireless_db.empty())
            cfg.ebn0_wireless_db = {cfg.modulation == Modulation::Bpsk ? 3.0 : 6.0};
        break;
    case Scenario::Custom: break;
    }
    return cfg;
}

PhyParams effective_params(const ScenarioConfig& cfg)
{
    PhyParams p = cfg.params;
    p.modulation = cfg.modulation;
    p.n_data_symbols = cfg.n_data_symbols;
    return derive_params(std::move(p));
}

void validate(const ScenarioConfig& cfg)
{
    const auto p = effective_params(cfg);
    try {
        cfg.code.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("code", e.what());
    }
    if (p.code_rate != cfg.code.rate()) throw ConfigError("code_rate", "does not match the convolutional code");
    info_bits_per_frame(p, cfg.code);

    if (cfg.min_bits < 10'000) throw ConfigError("min_bits", "must be at least 10000");
    if (cfg.min_errors < 0) throw ConfigError("min_errors", "must be non-negative");
    if (cfg.max_bits < cfg.min_bits) throw ConfigError("max_bits", "must be at least min_bits");
    if (cfg.knowledge.empty()) throw ConfigError("knowledge", "at least one knowledge mode is required");
    if (cfg.frames_per_batch < 1) throw ConfigError("frames_per_batch", "must be positive");
    if (cfg.queue_depth < 1) throw ConfigError("queue_depth", "must be positive");
    if (cfg.receiver.timing_advance < 0) throw ConfigError("timing_advance", "must be non-negative");
    if (cfg.receiver.timing_advance >= p.cp_len) throw ConfigError("timing_advance", "must be below cp_len");
    if (!(cfg.receiver.noise_alpha > 0.0 && cfg.receiver.noise_alpha <= 1.0))
        throw ConfigError("noise_alpha", "must be in (0, 1]");

    for (const LinkChannel* ch : {&cfg.plc_channel, &cfg.wireless_channel}) {
        const int taps = ch->taps.empty() ? 1 : static_cast<int>(ch->taps.size());
        if (ch->delay_samples < 0 || ch->delay_samples + taps - 1 > cfg.capture_margin)
            throw ConfigError("delay_samples", "channel delay must lie within the capture margin");
    }

    if (cfg.ebn0_plc_db.empty()) throw ConfigError("ebn0_plc", "sweep list must not be empty");
    switch (cfg.scenario) {
    case Scenario::EqualSweep:
        for (const auto& l : cfg.ebn0_plc_db)
            if (!l) throw ConfigError("ebn0_plc", "equal sweeps need numeric levels");
        break;
    case Scenario::FixedWirelessSweep:
        if (cfg.ebn0_wireless_db.size() != 1)
            throw ConfigError("ebn0_wireless", "fixed-wireless sweeps need exactly one wireless level");
        break;
    case Scenario::LinkDown: {
        if (cfg.ebn0_wireless_db.empty()) throw ConfigError("ebn0_wireless", "sweep list must not be empty");
        auto all_down = [](const std::vector<LinkLevel>& v) {
            return std::all_of(v.begin(), v.end(), [](const LinkLevel& l) { return !l; });
        };
        if (!all_down(cfg.ebn0_plc_db) && !all_down(cfg.ebn0_wireless_db))
            throw ConfigError("scenario", "link-down needs one link set to 'down'");
        break;
    }
    case Scenario::Custom:
        if (cfg.ebn0_wireless_db.empty()) throw ConfigError("ebn0_wireless", "sweep list must not be empty");
        break;
    }
}

ChannelConfig channel_config(const ScenarioConfig& cfg, Link link, LinkLevel level)
{
    const auto& ch = link == Link::Plc ? cfg.plc_channel : cfg.wireless_channel;
    ChannelConfig c;
    c.gain = ch.gain;
    c.taps = ch.taps;
    c.delay_samples = ch.delay_samples;
    c.ebn0_db = level;
    c.capture_margin = cfg.capture_margin;
    return c;
}

std::vector<OperatingPoint> sweep_points(const ScenarioConfig& cfg)
{
    std::vector<OperatingPoint> pts;
    switch (cfg.scenario) {
    case Scenario::EqualSweep:
        for (const auto& l : cfg.ebn0_plc_db) pts.push_back({l, l});
        break;
    case Scenario::FixedWirelessSweep:
        for (const auto& l : cfg.ebn0_plc_db) pts.push_back({l, cfg.ebn0_wireless_db.at(0)});
        break;
    case Scenario::LinkDown:
    case Scenario::Custom:
        for (const auto& p : cfg.ebn0_plc_db)
            for (const auto& w : cfg.ebn0_wireless_db) pts.push_back({p, w});
        break;
    }
    return pts;
}

namespace {

constexpr std::uint64_t kPointTag = 0x706f696e74ULL;  // "point"

class PointAccumulator {
public:
    explicit PointAccumulator(const std::vector<Knowledge>& knowledge) : tallies_(knowledge.size() * 3)
    {
        for (std::size_t m = 0; m < knowledge.size(); ++m)
            for (int l = 0; l < 3; ++l) {
                tallies_[m * 3 + l].knowledge = knowledge[m];
                tallies_[m * 3 + l].link = static_cast<Link>(l);
            }
    }

    void add(const FrameOutcome& o)
    {
        for (std::size_t i = 0; i < tallies_.size(); ++i) {
            tallies_[i].bits += o.tallies[i].bits;
            tallies_[i].errors += o.tallies[i].errors;
        }
        ++frames_;
    }

    bool done(const ScenarioConfig& cfg) const
    {
        const long long bits = tallies_.front().bits;
        if (bits >= cfg.max_bits) return true;
        const auto min_err = std::min_element(tallies_.begin(), tallies_.end(), [](auto& a, auto& b) {
                                 return a.errors < b.errors;
                             })->errors;
        return bits >= cfg.min_bits && min_err >= cfg.min_errors;
    }

    long long frames() const { return frames_; }

    std::vector<BerRecord> records(const ScenarioConfig& cfg, const OperatingPoint& pt) const
    {
        std::vector<BerRecord> out;
        for (const auto& t : tallies_) {
            BerRecord r;
            r.scenario = cfg.scenario;
            r.modulation = cfg.modulation;
            r.link = t.link;
            r.ebn0_plc_db = pt.plc;
            r.ebn0_wireless_db = pt.wireless;
            r.knowledge = t.knowledge;
            r.bits_total = t.bits;
            r.bit_errors = t.errors;
            r.ber = t.bits > 0 ? double(t.errors) / double(t.bits) : 0.0;
            r.seed = cfg.seed;
            out.push_back(r);
        }
        return out;
    }

private:
    std::vector<LinkTally> tallies_;
    long long frames_ = 0;
};

CombinerStats run_pipelined(const ScenarioConfig& cfg, const LinkSimulation& sim, PointAccumulator& acc,
                            const OutcomeSink& sink)
{
    const bool paced = cfg.realtime_pacing;
    const auto policy = paced ? OverflowPolicy::DropOldest : OverflowPolicy::Block;
    FrameQueue queue_p(cfg.queue_depth, policy), queue_w(cfg.queue_depth, policy);

    const long long batch = cfg.frames_per_batch;
    const long long frame_cap =
        ((cfg.max_bits + sim.info_bits_per_frame() - 1) / sim.info_bits_per_frame() + batch - 1) / batch * batch;
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(sim.params().frame_period_s));
    const auto start = std::chrono::steady_clock::now();

    std::exception_ptr errors[2];
    auto producer = [&](Link link, FrameQueue& queue, std::exception_ptr& error) {
        try {
            NoiseTracker tracker(cfg.receiver.noise_mode, cfg.receiver.noise_alpha);
            for (long long f = 0; f < frame_cap; ++f) {
                if (paced) std::this_thread::sleep_until(start + f * period);
                const TxFrame tx = sim.transmit(f);
                const auto front = sim.receive_front(tx, f, link);
                const auto noise = tracker.update(front.noise_stats);
                if (!queue.push(sim.finish_link(tx, f, link, front, noise))) return;
            }
        } catch (...) {
            error = std::current_exception();
        }
        queue.close();
    };

    std::thread plc_thread(producer, Link::Plc, std::ref(queue_p), std::ref(errors[0]));
    std::thread wireless_thread(producer, Link::Wireless, std::ref(queue_w), std::ref(errors[1]));

    CombinerStats stats;
    std::exception_ptr consumer_error;
    try {
        stats = combiner_loop(
            queue_p, queue_w, cfg.code,
            [&](const FrameOutcome& o) {
                acc.add(o);
                if (sink) sink(o);
                return !(acc.frames() % batch == 0 && acc.done(cfg));
            },
            cfg.combining);
    } catch (...) {
        consumer_error = std::current_exception();
        queue_p.close();
        queue_w.close();
    }
    plc_thread.join();
    wireless_thread.join();
    if (consumer_error) std::rethrow_exception(consumer_error);
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return stats;
}

}  // namespace

PointResult run_point(const ScenarioConfig& cfg, const OperatingPoint& point, int point_index, ExecMode mode,
                      const OutcomeSink& sink)
{
    validate(cfg);
    const LinkSimulation sim(effective_params(cfg), cfg.code, channel_config(cfg, Link::Plc, point.plc),
                             channel_config(cfg, Link::Wireless, point.wireless), cfg.receiver, cfg.knowledge,
                             cfg.common_noise ? derive_seed(cfg.seed, {kPointTag})
                                             : derive_seed(cfg.seed, {kPointTag, static_cast<std::uint64_t>(point_index)}));
    PointAccumulator acc(cfg.knowledge);
    PointResult result;

    if (mode == ExecMode::Pipelined || cfg.realtime_pacing) {
        result.combiner = run_pipelined(cfg, sim, acc, sink);
    } else {
        LinkTrackers trackers(cfg.receiver);
        do {
            const long long first = acc.frames();
            const auto outcomes = mode == ExecMode::Serial
                                      ? simulate_frames_serial(sim, trackers, first, cfg.frames_per_batch, cfg.combining)
                                      : simulate_frames_omp(sim, trackers, first, cfg.frames_per_batch, cfg.combining);
            for (const auto& o : outcomes) {
                acc.add(o);
                if (sink) sink(o);
            }
            result.combiner.combined += static_cast<long long>(outcomes.size());
        } while (!acc.done(cfg));
    }
    result.frames = acc.frames();
    result.records = acc.records(cfg, point);
    return result;
}

ResultSet run_scenario(const ScenarioConfig& cfg_in, ExecMode mode, const OutcomeSink& sink)
{
    const ScenarioConfig cfg = with_defaults(cfg_in);
    validate(cfg);
    ResultSet rs;
    rs.config = cfg;
    rs.params_hash = params_hash(cfg);
    const auto points = sweep_points(cfg);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto r = run_point(cfg, points[i], static_cast<int>(i), mode, sink);
        rs.rows.insert(rs.rows.end(), r.records.begin(), r.records.end());
        rs.combiner.push_back(r.combiner);
    }
    return rs;
}

double binomial_sigma(double ber, long long bits)
{
    if (bits <= 0) return 0.0;
    return std::sqrt(std::max(ber * (1.0 - ber), 0.0) / double(bits));
}

std::vector<CurvePoint> extract_curve(const std::vector<BerRecord>& rows, Link link, Knowledge knowledge)
{
    std::vector<CurvePoint> out;
    for (const auto& r : rows) {
        if (r.link != link || r.knowledge != knowledge) continue;
        const LinkLevel axis = r.ebn0_plc_db ? r.ebn0_plc_db : r.ebn0_wireless_db;
        if (!axis) continue;
        out.push_back({*axis, r.bits_total, r.bit_errors, r.ber});
    }
    return out;
}

std::optional<double> ebn0_at_ber(const std::vector<CurvePoint>& curve, double target_ber)
{
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto& a = curve[i - 1];
        const auto& b = curve[i];
        if (a.ber >= target_ber && b.ber < target_ber) {
            if (b.ber <= 0.0) return b.ebn0_db;
            const double la = std::log10(a.ber), lb = std::log10(b.ber), lt = std::log10(target_ber);
            return a.ebn0_db + (lt - la) / (lb - la) * (b.ebn0_db - a.ebn0_db);
        }
    }
    return std::nullopt;
}

}  // namespace dualink
