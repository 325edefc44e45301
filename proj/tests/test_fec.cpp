#include <doctest.h>

#include <random>

#include "dualink/fec.hpp"
#include "oracles.hpp"

using namespace dualink;

namespace {

std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, int n)
{
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = rng() & 1u;
    return v;
}

}  // namespace

TEST_CASE("zero input encodes to zeros with the tail")
{
    const ConvCode code;
    const std::vector<std::uint8_t> zeros(10, 0);
    const auto coded = conv_encode(zeros, code);
    CHECK(coded.size() == 32);
    for (auto c : coded) CHECK(c == 0);
    CHECK(code.coded_length(10) == 32);
    CHECK(code.info_length(32) == 10);
    CHECK(code.info_length(33) == -1);
    CHECK(code.rate().value() == doctest::Approx(0.5));
}

TEST_CASE("impulse response is the interleaved generators")
{
    // 171 = 001 111 001 -> 1111001, 133 = 001 011 011 -> 1011011
    const std::vector<int> g0{1, 1, 1, 1, 0, 0, 1};
    const std::vector<int> g1{1, 0, 1, 1, 0, 1, 1};
    CHECK(oracle::generator_taps(0171, 7) == g0);
    CHECK(oracle::generator_taps(0133, 7) == g1);

    std::vector<std::uint8_t> impulse(7, 0);
    impulse[0] = 1;
    const auto coded = conv_encode(impulse, ConvCode{});
    REQUIRE(coded.size() == 26);
    for (int t = 0; t < 7; ++t) {
        CHECK(coded[2 * t] == g0[t]);
        CHECK(coded[2 * t + 1] == g1[t]);
    }
    for (std::size_t i = 14; i < coded.size(); ++i) CHECK(coded[i] == 0);
}

TEST_CASE("encoder matches the shift-register model")
{
    std::mt19937_64 rng(11);
    const ConvCode code;
    for (int n : {1, 2, 7, 33, 200}) {
        const auto info = random_bits(rng, n);
        CHECK(conv_encode(info, code) == oracle::encode(info, code.generators, 7));
    }
    ConvCode k5;
    k5.constraint_length = 5;
    k5.generators = {023, 035, 037};
    const auto info = random_bits(rng, 40);
    CHECK(conv_encode(info, k5) == oracle::encode(info, k5.generators, 5));
}

TEST_CASE("encoder is linear")
{
    std::mt19937_64 rng(12);
    const ConvCode code;
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_bits(rng, 64);
        const auto b = random_bits(rng, 64);
        std::vector<std::uint8_t> ab(64);
        for (int i = 0; i < 64; ++i) ab[i] = a[i] ^ b[i];
        const auto ca = conv_encode(a, code);
        const auto cb = conv_encode(b, code);
        const auto cab = conv_encode(ab, code);
        for (std::size_t i = 0; i < cab.size(); ++i) CHECK(cab[i] == (ca[i] ^ cb[i]));
    }
}

TEST_CASE("noiseless round trip")
{
    std::mt19937_64 rng(13);
    const ConvCode code;
    const auto info = random_bits(rng, 100);
    CHECK(viterbi_decode(hard_llrs(conv_encode(info, code), 1e6), code) == info);
    CHECK(viterbi_decode(hard_llrs(conv_encode(info, code)), code) == info);
}

TEST_CASE("a single flipped coded bit is corrected")
{
    std::mt19937_64 rng(14);
    const ConvCode code;
    const auto info = random_bits(rng, 20);
    const auto llr = hard_llrs(conv_encode(info, code));
    for (std::size_t i = 0; i < llr.size(); ++i) {
        auto bad = llr;
        bad[i] = -bad[i];
        CHECK(viterbi_decode(bad, code) == info);
    }
}

TEST_CASE("Viterbi equals exhaustive ML on every block up to 10 bits")
{
    std::mt19937_64 rng(15);
    const ConvCode code;
    for (int n = 1; n <= 10; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            const auto llr = oracle::random_llrs(rng, code.coded_length(n));
            const auto ml = oracle::brute_force_ml(llr, n, code.generators, 7);
            const auto got = viterbi_decode(llr, code);
            CHECK(correlation_metric(llr, conv_encode(got, code)) >= ml.metric - 1e-9);
            CHECK(got == ml.bits);
        }
    }
}

TEST_CASE("decoding ignores positive scaling of the LLRs")
{
    std::mt19937_64 rng(16);
    const ConvCode code;
    for (int trial = 0; trial < 20; ++trial) {
        auto llr = oracle::random_llrs(rng, code.coded_length(50), 1.5);
        const auto ref = viterbi_decode(llr, code);
        for (double c : {1e-3, 0.37, 8.0, 1e4}) {
            auto scaled = llr;
            for (auto& x : scaled) x *= c;
            CHECK(viterbi_decode(scaled, code) == ref);
        }
    }
}

TEST_CASE("all-zero LLRs decode to zeros")
{
    const ConvCode code;
    const std::vector<double> llr(code.coded_length(12), 0.0);
    CHECK(viterbi_decode(llr, code) == std::vector<std::uint8_t>(12, 0));
}

TEST_CASE("fec argument checks")
{
    const ConvCode code;
    CHECK_THROWS_AS(conv_encode(std::vector<std::uint8_t>{}, code), std::invalid_argument);
    CHECK_THROWS_AS(viterbi_decode(std::vector<double>(31), code), std::invalid_argument);
    CHECK_THROWS_AS(viterbi_decode(std::vector<double>(12), code), std::invalid_argument);  // tail only

    ConvCode wide;
    wide.generators = {0171, 0433};
    CHECK_THROWS_AS(wide.validate(), std::invalid_argument);
    ConvCode empty;
    empty.generators.clear();
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("LlrVector overload keeps the seed slot empty")
{
    std::mt19937_64 rng(17);
    const ConvCode code;
    const auto info = random_bits(rng, 30);
    LlrVector v;
    v.llrs = hard_llrs(conv_encode(info, code));
    v.frame_index = 4;
    CHECK(viterbi_decode(v, code).bits == info);
}
