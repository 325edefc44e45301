#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualink/harness.hpp"

using namespace dualink;

namespace {

ScenarioConfig small_config(Scenario s = Scenario::Custom)
{
    ScenarioConfig cfg;
    cfg.scenario = s;
    cfg.min_bits = 20'000;
    cfg.min_errors = 0;
    cfg.max_bits = 20'000;
    cfg.frames_per_batch = 8;
    cfg.seed = 2024;
    return cfg;
}

const BerRecord& find(const std::vector<BerRecord>& rows, Knowledge k, Link l)
{
    for (const auto& r : rows)
        if (r.knowledge == k && r.link == l) return r;
    throw std::logic_error("record missing");
}

bool same_records(const std::vector<BerRecord>& a, const std::vector<BerRecord>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].link != b[i].link || a[i].knowledge != b[i].knowledge || a[i].bits_total != b[i].bits_total ||
            a[i].bit_errors != b[i].bit_errors)
            return false;
    return true;
}

}  // namespace

TEST_CASE("level lists")
{
    CHECK(parse_levels("down", "x") == std::vector<LinkLevel>{std::nullopt});
    CHECK(parse_levels("fixed:3", "x") == std::vector<LinkLevel>{3.0});
    CHECK(parse_levels("-6:-2:1", "x") == std::vector<LinkLevel>{-6.0, -5.0, -4.0, -3.0, -2.0});
    CHECK(parse_levels("0:1:0.25", "x").size() == 5);
    CHECK(parse_levels("0:1:0.3", "x") == std::vector<LinkLevel>{0.0, 0.3, 0.6, 0.9});
    CHECK(parse_levels("7.3,down,1", "x") == std::vector<LinkLevel>{7.3, std::nullopt, 1.0});
    CHECK(parse_levels("-1e0", "x") == std::vector<LinkLevel>{-1.0});

    for (const char* bad : {"", "abc", "1:2", "2:1:1", "0:1:0", "0:1:-1", "1,,2", "fixed:", "3dB", "nan"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_levels(bad, "ebn0_plc"), ConfigError);
    }
}

TEST_CASE("scenario defaults and sweep grids")
{
    ScenarioConfig cfg;
    cfg.scenario = Scenario::LinkDown;
    auto c = with_defaults(cfg);
    REQUIRE(c.ebn0_plc_db.size() == 1);
    CHECK(*c.ebn0_plc_db[0] == doctest::Approx(7.30));
    CHECK_FALSE(c.ebn0_wireless_db[0].has_value());

    cfg.scenario = Scenario::EqualSweep;
    c = with_defaults(cfg);
    CHECK(c.ebn0_plc_db.size() == 15);
    auto pts = sweep_points(c);
    REQUIRE(pts.size() == 15);
    CHECK(*pts.front().plc == -6.0);
    CHECK(*pts.back().wireless == 8.0);
    cfg.modulation = Modulation::Dbpsk;
    CHECK(with_defaults(cfg).ebn0_plc_db.size() == 18);

    cfg.scenario = Scenario::FixedWirelessSweep;
    c = with_defaults(cfg);
    CHECK(*c.ebn0_wireless_db.at(0) == 6.0);
    cfg.modulation = Modulation::Bpsk;
    c = with_defaults(cfg);
    CHECK(*c.ebn0_wireless_db.at(0) == 3.0);
    pts = sweep_points(c);
    CHECK(pts.size() == 15);
    for (const auto& pt : pts) CHECK(*pt.wireless == 3.0);

    cfg.scenario = Scenario::Custom;
    cfg.ebn0_plc_db = {1.0, 2.0};
    cfg.ebn0_wireless_db = {std::nullopt, 0.0, 5.0};
    pts = sweep_points(cfg);
    REQUIRE(pts.size() == 6);
    CHECK(*pts[1].plc == 1.0);
    CHECK(*pts[1].wireless == 0.0);
    CHECK(*pts[3].plc == 2.0);
}

TEST_CASE("scenario validation")
{
    auto field_of = [](const ScenarioConfig& cfg) {
        try {
            validate(cfg);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("none");
    };
    auto cfg = with_defaults(ScenarioConfig{});
    CHECK(field_of(cfg) == "none");

    auto c = cfg;
    c.min_bits = 9'999;
    CHECK(field_of(c) == "min_bits");
    c = cfg;
    c.min_errors = -1;
    CHECK(field_of(c) == "min_errors");
    c = cfg;
    c.knowledge.clear();
    CHECK(field_of(c) == "knowledge");
    c = cfg;
    c.ebn0_plc_db.clear();
    CHECK(field_of(c) == "ebn0_plc");
    c = cfg;
    c.n_data_symbols = 0;
    CHECK(field_of(c) == "n_data_symbols");
    c = cfg;
    c.receiver.timing_advance = 64;
    CHECK(field_of(c) == "timing_advance");
    c = cfg;
    c.wireless_channel.delay_samples = 200;
    CHECK(field_of(c) == "delay_samples");
    c = cfg;
    c.scenario = Scenario::LinkDown;
    c.ebn0_wireless_db = {1.0};
    CHECK(field_of(c) == "scenario");
    c = cfg;
    c.params.code_rate = {1, 3};
    CHECK(field_of(c) == "code_rate");
}

TEST_CASE("curve crossing interpolates in log BER")
{
    std::vector<CurvePoint> curve{{-1, 0, 0, 0.2}, {0, 0, 0, 1e-2}, {1, 0, 0, 1e-4}, {2, 0, 0, 0.0}};
    CHECK(*ebn0_at_ber(curve, 1e-3) == doctest::Approx(0.5));
    CHECK(*ebn0_at_ber(curve, 1e-2 / std::sqrt(10.0)) == doctest::Approx(0.25));
    CHECK(*ebn0_at_ber(curve, 1e-5) == doctest::Approx(2.0));
    CHECK_FALSE(ebn0_at_ber(curve, 0.5).has_value());
    CHECK_FALSE(ebn0_at_ber({}, 1e-3).has_value());
    CHECK(binomial_sigma(0.5, 100) == doctest::Approx(0.05));
    CHECK(binomial_sigma(0.1, 0) == 0.0);
}

TEST_CASE("link-down points")
{
    auto cfg = small_config(Scenario::LinkDown);
    cfg.ebn0_plc_db = {7.30};
    cfg.ebn0_wireless_db = {std::nullopt};
    auto r = run_point(cfg, sweep_points(cfg)[0], 0).records;
    REQUIRE(r.size() == 6);
    for (auto k : {Knowledge::Perfect, Knowledge::Estimated}) {
        CHECK(find(r, k, Link::Plc).bit_errors == 0);
        CHECK(find(r, k, Link::Combined).bit_errors == 0);
        const auto& w = find(r, k, Link::Wireless);
        CHECK(w.ber == doctest::Approx(0.5).epsilon(0.03));
        CHECK(w.bits_total >= 20'000);
    }

    cfg.ebn0_plc_db = {std::nullopt};
    cfg.ebn0_wireless_db = {8.56};
    r = run_point(cfg, sweep_points(cfg)[0], 0).records;
    for (auto k : {Knowledge::Perfect, Knowledge::Estimated}) {
        CHECK(find(r, k, Link::Plc).ber == doctest::Approx(0.5).epsilon(0.03));
        CHECK(find(r, k, Link::Wireless).bit_errors == 0);
        CHECK(find(r, k, Link::Combined).bit_errors == 0);
    }
}

TEST_CASE("stopping rule")
{
    auto cfg = small_config();
    cfg.ebn0_plc_db = {0.0};
    cfg.ebn0_wireless_db = {0.0};
    cfg.knowledge = {Knowledge::Perfect};
    cfg.max_bits = 200'000;
    cfg.min_errors = 50;
    // combined BER ~3e-4 at 0 dB: 50 errors needs well over the minimum
    const auto res = run_point(cfg, sweep_points(cfg)[0], 0);
    const auto& comb = find(res.records, Knowledge::Perfect, Link::Combined);
    CHECK(comb.bits_total > 20'000);
    CHECK(res.frames % cfg.frames_per_batch == 0);
    CHECK((comb.bit_errors >= 50 || comb.bits_total >= 200'000));
    // every record of a point covers the same frames
    for (const auto& r : res.records) CHECK(r.bits_total == comb.bits_total);
    CHECK(comb.bits_total == res.frames * 714);

    cfg.ebn0_plc_db = {20.0};
    cfg.ebn0_wireless_db = {20.0};
    cfg.max_bits = 40'000;
    const auto capped = run_point(cfg, sweep_points(cfg)[0], 0);
    for (const auto& r : capped.records) {
        CHECK(r.bit_errors == 0);
        CHECK(r.ber == 0.0);
        CHECK(r.bits_total >= 40'000);
        CHECK(r.bits_total < 40'000 + 8 * 714);
    }
}

TEST_CASE("serial, OpenMP and pipelined runs agree frame by frame")
{
    for (auto m : {Modulation::Bpsk, Modulation::Dbpsk}) {
        auto cfg = small_config();
        cfg.modulation = m;
        cfg.ebn0_plc_db = {0.0};
        cfg.ebn0_wireless_db = {2.0};
        cfg.receiver.noise_mode = NoiseMode::AvgTime;  // tracker state must thread through correctly
        const auto pt = sweep_points(cfg)[0];
        std::vector<std::vector<long long>> traces(3);
        std::vector<std::vector<BerRecord>> records;
        int i = 0;
        for (auto mode : {ExecMode::Serial, ExecMode::Parallel, ExecMode::Pipelined}) {
            auto& trace = traces[i++];
            const auto res = run_point(cfg, pt, 3, mode, [&](const FrameOutcome& o) {
                trace.push_back(o.frame_index);
                for (const auto& t : o.tallies) trace.push_back(t.errors);
                for (const auto& d : o.diagnostics) trace.push_back(d.detected_offset);
            });
            records.push_back(res.records);
        }
        CHECK(traces[0] == traces[1]);
        CHECK(traces[0] == traces[2]);
        CHECK(same_records(records[0], records[1]));
        CHECK(same_records(records[0], records[2]));
        CHECK(find(records[0], Knowledge::Estimated, Link::Plc).bit_errors > 0);
    }
}

TEST_CASE("realtime pacing holds the frame period")
{
    auto cfg = small_config();
    cfg.ebn0_plc_db = {3.0};
    cfg.ebn0_wireless_db = {3.0};
    cfg.min_bits = cfg.max_bits = 10'000;  // 15 frames, rounded up to 16
    cfg.params.frame_period_s = 0.05;
    cfg.frames_per_batch = 16;
    cfg.realtime_pacing = true;
    const auto t0 = std::chrono::steady_clock::now();
    const auto paced = run_point(cfg, sweep_points(cfg)[0], 0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs >= 15 * 0.05 * 0.95);
    CHECK(paced.frames == 16);
    if (paced.combiner.dropped_plc == 0 && paced.combiner.dropped_wireless == 0) {
        cfg.realtime_pacing = false;
        CHECK(same_records(paced.records, run_point(cfg, sweep_points(cfg)[0], 0, ExecMode::Serial).records));
    }
}

TEST_CASE("CSV output is byte-identical on rerun")
{
    auto cfg = small_config(Scenario::Custom);
    cfg.ebn0_plc_db = {1.0, std::nullopt};
    cfg.ebn0_wireless_db = {1.5};
    std::ostringstream a, b;
    const auto rs = run_scenario(cfg);
    REQUIRE(rs.combiner.size() == 2);
    CHECK(rs.combiner[0].combined == rs.combiner[1].combined);
    write_csv(rs, a);
    write_csv(run_scenario(cfg, ExecMode::Serial), b);
    CHECK(a.str() == b.str());

    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == std::string("# ") + kVersion);
    std::getline(in, line);
    CHECK(line.rfind("# params_hash=", 0) == 0);
    CHECK(line.size() == 14 + 16);
    std::getline(in, line);
    CHECK(line.rfind("# seed=2024", 0) == 0);
    std::getline(in, line);
    CHECK(line == "scenario,modulation,knowledge,ebn0_plc_db,ebn0_wireless_db,link,bits_total,bit_errors,ber,seed");
    std::getline(in, line);
    CHECK(line.rfind("custom,bpsk,perfect,1.00,1.50,plc,", 0) == 0);
    int rows = 1, down_rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        down_rows += line.find(",down,") != std::string::npos;
        CHECK(std::count(line.begin(), line.end(), ',') == 9);
    }
    CHECK(rows == 12);
    CHECK(down_rows == 6);

    // the hash follows the physical setup, not the sweep
    auto other = cfg;
    other.ebn0_plc_db = {4.0};
    CHECK(params_hash(other) == params_hash(cfg));
    other.wireless_channel.delay_samples = 3;
    CHECK(params_hash(other) != params_hash(cfg));
}

TEST_CASE("unwritable CSV path is an I/O error")
{
    ResultSet rs;
    rs.config = with_defaults(ScenarioConfig{});
    CHECK_THROWS_AS(write_csv_file(rs, "/nonexistent/dir/out.csv"), IoError);
    const auto path = std::filesystem::temp_directory_path() / "dualink_empty.csv";
    write_csv_file(rs, path);
    CHECK(std::filesystem::file_size(path) > 0);
    std::filesystem::remove(path);
}

TEST_CASE("perfect knowledge never loses to estimated")
{
    for (auto m : {Modulation::Bpsk, Modulation::Dbpsk}) {
        auto cfg = small_config();
        cfg.modulation = m;
        const double x = m == Modulation::Bpsk ? 1.0 : 3.0;
        cfg.ebn0_plc_db = {x};
        cfg.ebn0_wireless_db = {x};
        cfg.min_bits = cfg.max_bits = 60'000;
        const auto r = run_point(cfg, sweep_points(cfg)[0], 0).records;
        for (auto l : {Link::Plc, Link::Wireless, Link::Combined}) {
            const auto& p = find(r, Knowledge::Perfect, l);
            const auto& e = find(r, Knowledge::Estimated, l);
            CHECK(p.ber <= e.ber + 3 * binomial_sigma(e.ber, e.bits_total));
        }
    }
}

TEST_CASE("DBPSK needs more Eb/N0 than BPSK")
{
    auto cfg = small_config();
    cfg.ebn0_plc_db = {2.0};
    cfg.ebn0_wireless_db = {2.0};
    cfg.knowledge = {Knowledge::Perfect};
    cfg.min_bits = cfg.max_bits = 40'000;
    const auto bpsk = run_point(cfg, sweep_points(cfg)[0], 0).records;
    cfg.modulation = Modulation::Dbpsk;
    const auto dbpsk = run_point(cfg, sweep_points(cfg)[0], 0).records;
    for (auto l : {Link::Plc, Link::Wireless})
        CHECK(find(dbpsk, Knowledge::Perfect, l).ber > 3 * find(bpsk, Knowledge::Perfect, l).ber);
}

TEST_CASE("combined BER does not rise with either link's Eb/N0")
{
    auto cfg = small_config(Scenario::Custom);
    cfg.ebn0_plc_db = {-3.0, -2.0, -1.0, 0.0};
    cfg.ebn0_wireless_db = {-1.0};
    cfg.common_noise = true;
    cfg.min_bits = cfg.max_bits = 40'000;
    auto rs = run_scenario(cfg);
    for (auto k : {Knowledge::Perfect, Knowledge::Estimated}) {
        const auto curve = extract_curve(rs.rows, Link::Combined, k);
        REQUIRE(curve.size() == 4);
        for (std::size_t i = 1; i < curve.size(); ++i)
            CHECK(curve[i].ber <= curve[i - 1].ber + 3 * binomial_sigma(curve[i - 1].ber, curve[i - 1].bits));
    }

    // sweeping the wireless side instead
    cfg.ebn0_plc_db = {-1.0};
    cfg.ebn0_wireless_db = {-3.0, -2.0, -1.0, 0.0};
    rs = run_scenario(cfg);
    std::vector<const BerRecord*> comb;
    for (const auto& r : rs.rows)
        if (r.link == Link::Combined && r.knowledge == Knowledge::Perfect) comb.push_back(&r);
    REQUIRE(comb.size() == 4);
    for (std::size_t i = 1; i < comb.size(); ++i)
        CHECK(comb[i]->ber <= comb[i - 1]->ber + 3 * binomial_sigma(comb[i - 1]->ber, comb[i - 1]->bits_total));
}

TEST_CASE("noiseless end-to-end loopback is exact")
{
    for (auto m : {Modulation::Bpsk, Modulation::Dbpsk})
        for (auto mode : {NoiseMode::Instantaneous, NoiseMode::AvgTime, NoiseMode::AvgTimeFreq}) {
            auto cfg = small_config();
            cfg.modulation = m;
            cfg.receiver.noise_mode = mode;
            cfg.ebn0_plc_db = {300.0};
            cfg.ebn0_wireless_db = {300.0};
            for (const auto& r : run_point(cfg, sweep_points(cfg)[0], 0).records) CHECK(r.bit_errors == 0);
        }
}
