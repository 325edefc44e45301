#include "dualink/fec.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace dualink {

void ConvCode::validate() const
{
    if (constraint_length < 2 || constraint_length > 16)
        throw std::invalid_argument("ConvCode: constraint_length must be in [2, 16]");
    if (generators.empty()) throw std::invalid_argument("ConvCode: generators must not be empty");
    if (generators.size() > 8) throw std::invalid_argument("ConvCode: at most 8 generators are supported");
    for (unsigned g : generators)
        if (g == 0 || (g >> constraint_length) != 0)
            throw std::invalid_argument("ConvCode: generator does not fit within constraint_length bits");
}

long long ConvCode::info_length(long long coded_bits) const
{
    if (coded_bits <= 0 || coded_bits % n_outputs() != 0) return -1;
    const long long steps = coded_bits / n_outputs();
    return steps > tail_bits() ? steps - tail_bits() : -1;
}

std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> bits, const ConvCode& code)
{
    code.validate();
    if (bits.empty()) throw std::invalid_argument("conv_encode: empty input");

    const int K = code.constraint_length;
    const int n = code.n_outputs();
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(code.coded_length(static_cast<long long>(bits.size()))));

    unsigned state = 0;  // previous K-1 inputs, most recent in the MSB
    auto step = [&](unsigned u) {
        const unsigned reg = (u << (K - 1)) | state;
        for (int j = 0; j < n; ++j)
            out.push_back(static_cast<std::uint8_t>(std::popcount(reg & code.generators[j]) & 1));
        state = reg >> 1;
    };
    for (auto b : bits) step(b & 1u);
    for (int t = 0; t < code.tail_bits(); ++t) step(0);
    return out;
}

std::vector<std::uint8_t> viterbi_decode(std::span<const double> llrs, const ConvCode& code)
{
    code.validate();
    const long long info_len = code.info_length(static_cast<long long>(llrs.size()));
    if (info_len < 0)
        throw std::invalid_argument("viterbi_decode: LLR count is not a whole terminated block");

    const int K = code.constraint_length;
    const int n = code.n_outputs();
    const int n_states = code.n_states();
    const unsigned state_mask = static_cast<unsigned>(n_states - 1);
    const std::size_t steps = llrs.size() / n;

    // Output pattern (bit j = output j) for every register value.
    std::vector<unsigned> pattern(std::size_t(1) << K);
    for (unsigned reg = 0; reg < pattern.size(); ++reg) {
        unsigned p = 0;
        for (int j = 0; j < n; ++j) p |= unsigned(std::popcount(reg & code.generators[j]) & 1) << j;
        pattern[reg] = p;
    }

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> metric(n_states, kNegInf), next(n_states);
    metric[0] = 0.0;
    std::vector<double> pattern_metric(std::size_t(1) << n);
    std::vector<std::uint8_t> decision(steps * n_states);

    for (std::size_t t = 0; t < steps; ++t) {
        const double* l = llrs.data() + t * n;
        for (unsigned p = 0; p < pattern_metric.size(); ++p) {
            double m = 0.0;
            for (int j = 0; j < n; ++j) m += ((p >> j) & 1u) ? -l[j] : l[j];
            pattern_metric[p] = m;
        }
        std::uint8_t* dec = decision.data() + t * n_states;
        for (int ns = 0; ns < n_states; ++ns) {
            const unsigned u = unsigned(ns) >> (K - 2);
            const unsigned base = (unsigned(ns) << 1) & state_mask;
            double best = kNegInf;
            std::uint8_t best_b = 0;
            for (unsigned b = 0; b < 2; ++b) {
                const unsigned s = base | b;
                if (metric[s] == kNegInf) continue;
                const unsigned reg = (u << (K - 1)) | s;
                const double cand = metric[s] + pattern_metric[pattern[reg]];
                if (cand > best) {
                    best = cand;
                    best_b = static_cast<std::uint8_t>(b);
                }
            }
            next[ns] = best;
            dec[ns] = best_b;
        }
        metric.swap(next);
    }

    // Zero-tail: the ML path ends in state 0.
    std::vector<std::uint8_t> path(steps);
    unsigned state = 0;
    for (std::size_t t = steps; t-- > 0;) {
        path[t] = static_cast<std::uint8_t>(state >> (K - 2));
        state = ((state << 1) & state_mask) | decision[t * n_states + state];
    }
    path.resize(static_cast<std::size_t>(info_len));
    return path;
}

BitSequence viterbi_decode(const LlrVector& llrs, const ConvCode& code)
{
    return {viterbi_decode(std::span<const double>(llrs.llrs), code), 0};
}

double correlation_metric(std::span<const double> llrs, std::span<const std::uint8_t> coded)
{
    if (llrs.size() != coded.size()) throw std::invalid_argument("correlation_metric: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < llrs.size(); ++i) m += coded[i] ? -llrs[i] : llrs[i];
    return m;
}

std::vector<double> hard_llrs(std::span<const std::uint8_t> coded, double magnitude)
{
    std::vector<double> out(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) out[i] = coded[i] ? -magnitude : magnitude;
    return out;
}

}  // namespace dualink
