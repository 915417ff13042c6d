#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "marc/analysis.hpp"
#include "marc/errors.hpp"
#include "marc/marc.hpp"
#include "marc/rng.hpp"

using namespace marc;

namespace {

MarcConfig small_code() {
    MarcConfig mc;
    mc.m = 4;
    mc.primitive_poly = 0x13;
    mc.k = 7;
    return mc;
}

std::vector<std::uint8_t> random_bits(int n, Rng& rng) {
    std::vector<std::uint8_t> b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng.bit());
    return b;
}

} // namespace

TEST_CASE("information transfer function: limits, growth, inversion") {
    CHECK(j_function(0.0) == 0.0);
    CHECK(j_function(-1.0) == 0.0);
    CHECK(j_function(kSigmaCap) > 1.0 - 2e-6);

    double prev = 0.0;
    for (double s : {0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0}) {
        double j = j_function(s);
        CHECK(j > prev);
        CHECK(j < 1.0);
        prev = j;
    }

    for (double i = 0.01; i < 0.995; i += 0.014)
        CHECK(std::fabs(j_function(j_inverse(i)) - i) < 1e-4);
    for (double s : {0.3, 1.0, 2.5, 5.0})
        CHECK(j_inverse(j_function(s)) == doctest::Approx(s).epsilon(1e-6));

    CHECK(j_inverse(0.0) == 0.0);
    CHECK(j_inverse(1.0) == kSigmaCap);
    CHECK(j_inverse(0.9999999) == kSigmaCap);
}

TEST_CASE("synthetic priors carry the requested information") {
    Rng rng(31);
    auto bits = random_bits(100000, rng);

    auto zero = gen_apriori(bits, 0.0, rng);
    CHECK(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }));

    // self-consistency through the independent estimator
    auto half = gen_apriori(bits, 0.5, rng);
    CHECK(mutual_information(bits, half) == doctest::Approx(0.5).epsilon(0.02));

    // sample estimate against the quadrature that defines the map
    auto s2 = gen_apriori_sigma(bits, 2.0, rng);
    CHECK(std::fabs(mutual_information(bits, s2) - j_function(2.0)) < 0.01);

    // the binned estimator of the defining integral agrees
    CHECK(std::fabs(mutual_information_histogram(bits, s2) - j_function(2.0)) < 0.02);
}

TEST_CASE("mutual information estimator: limits, symmetry, bounds") {
    Rng rng(32);
    auto bits = random_bits(20000, rng);

    std::vector<double> zeros(bits.size(), 0.0);
    CHECK(mutual_information(bits, zeros) == 0.0);

    std::vector<double> certain(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) certain[i] = bits[i] ? -30.0 : 30.0;
    CHECK(mutual_information(bits, certain) > 1.0 - 1e-3);

    // junk LLRs independent of the bits carry nothing
    std::vector<double> junk(bits.size());
    for (auto& v : junk) v = (rng.uniform() - 0.5) * 10.0;
    CHECK(mutual_information(bits, junk) < 0.03);

    // symmetric under simultaneous sign flip
    auto a = gen_apriori(bits, 0.4, rng);
    auto flipped_bits = bits;
    auto flipped_llr = a;
    for (auto& b : flipped_bits) b ^= 1;
    for (auto& v : flipped_llr) v = -v;
    CHECK(mutual_information(bits, a) ==
          doctest::Approx(mutual_information(flipped_bits, flipped_llr)).epsilon(1e-12));

    for (double i : {0.0, 0.3, 0.7, 0.97}) {
        auto l = gen_apriori(bits, i, rng);
        double est = mutual_information(bits, l);
        CHECK(est >= 0.0);
        CHECK(est <= 1.0);
    }

    CHECK_THROWS_AS(mutual_information({0, 1}, {1.0}), LengthMismatch);
    CHECK_THROWS_AS(mutual_information_histogram({0, 1}, {1.0}), LengthMismatch);
    CHECK_THROWS_AS(mutual_information_histogram(bits, zeros, 1), ConfigError);
    std::vector<std::uint8_t> ones(50, 1);
    std::vector<double> some(50, 2.0);
    CHECK_THROWS_AS(mutual_information_histogram(ones, some), ConfigError);
}

TEST_CASE("default a-priori grid spans [0,1]") {
    auto g = default_ia_grid();
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("inner transfer curve: positive at zero prior, monotone, SNR-ordered") {
    MarcSystem sys(small_code());
    ExitConfig cfg;
    cfg.trials = 60;
    cfg.seed = 7;
    cfg.i_a_grid = {0.0, 0.25, 0.5, 0.75, 0.95};

    ExitCurve c2 = exit_inner(sys, 2.0, cfg);
    ExitCurve c3 = exit_inner(sys, 3.0, cfg);
    REQUIRE(c2.points.size() == 5);
    CHECK(c2.decoder == "inner");
    CHECK(c2.eb_n0_db == 2.0);

    CHECK(c2.points[0].i_e > 0.0); // the channel alone conveys information

    for (std::size_t i = 1; i < c2.points.size(); ++i)
        CHECK(c2.points[i].i_e >= c2.points[i - 1].i_e - 0.01);

    // better channel lifts the whole curve; the common-random coupling makes
    // the pointwise comparison deterministic for a fixed seed
    for (std::size_t i = 0; i < c2.points.size(); ++i)
        CHECK(c3.points[i].i_e > c2.points[i].i_e);
    CHECK(c3.points[0].i_e > c2.points[0].i_e + 0.005);

    // adding the systematic channel term can only add information
    ExitConfig with = cfg;
    with.include_channel_term = true;
    ExitCurve cw = exit_inner(sys, 2.0, with);
    for (std::size_t i = 0; i < cw.points.size(); ++i)
        CHECK(cw.points[i].i_e >= c2.points[i].i_e - 0.01);
    CHECK(cw.points[0].i_e > c2.points[0].i_e + 0.02);
}

TEST_CASE("outer transfer curve: monotone and saturating") {
    MarcSystem sys(small_code());
    ExitConfig cfg;
    cfg.trials = 60;
    cfg.seed = 8;
    cfg.i_a_grid = {0.0, 0.25, 0.5, 0.75, 0.999};

    ExitCurve c = exit_outer(sys, cfg);
    REQUIRE(c.points.size() == 5);
    CHECK(c.decoder == "outer");
    for (std::size_t i = 1; i < c.points.size(); ++i)
        CHECK(c.points[i].i_e >= c.points[i - 1].i_e - 0.01);
    CHECK(c.points.back().i_e > 0.99); // perfect prior decodes everything
}

TEST_CASE("tunnel test on synthetic curves") {
    ExitCurve inner;
    inner.points = {{0.0, 0.3}, {0.5, 0.6}, {0.95, 0.9}};
    ExitCurve strong;
    strong.points = {{0.0, 0.0}, {0.3, 0.4}, {0.6, 0.8}, {0.9, 0.99}, {1.0, 1.0}};
    CHECK(tunnel_open(inner, strong));

    ExitCurve weak;
    weak.points = {{0.0, 0.0}, {0.3, 0.1}, {0.6, 0.45}, {1.0, 0.9}};
    CHECK_FALSE(tunnel_open(inner, weak));

    // the eps band excludes the saturated top-right corner
    ExitCurve top = inner;
    top.points.push_back({0.995, 0.91});
    CHECK(tunnel_open(top, strong, 0.02));
    CHECK_FALSE(tunnel_open(top, strong, 0.001));

    CHECK_THROWS_AS(tunnel_open(inner, ExitCurve{}), ConfigError);
}

TEST_CASE("per-realization tunnel fraction tracks channel quality") {
    MarcConfig mc = small_code();
    mc.relay_mode = RelayMode::Ideal;
    MarcSystem sys(mc);

    ExitConfig ocfg;
    ocfg.trials = 80;
    ocfg.seed = 5;
    ExitCurve outer = exit_outer(sys, ocfg);

    ExitConfig cfg;
    cfg.trials = 30;
    cfg.seed = 5;
    cfg.i_a_grid = {0.0, 0.25, 0.5, 0.75, 0.95};

    double lo = tunnel_open_fraction(sys, -5.0, cfg, outer);
    double hi = tunnel_open_fraction(sys, 12.0, cfg, outer);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(hi >= 0.9);
    CHECK(lo < hi);

    CHECK(tunnel_open_fraction(sys, 12.0, cfg, outer) == hi); // deterministic

    ExitConfig bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(tunnel_open_fraction(sys, 12.0, bad, outer), ConfigError);
}

TEST_CASE("error-rate sweep: shape, bookkeeping, determinism") {
    MarcConfig mc = small_code();
    mc.joint_iterations = 3;
    MarcSystem sys(mc);

    BerConfig cfg;
    cfg.eb_n0_grid = {3.0, 5.0};
    cfg.min_frame_errors = 1000000000;
    cfg.min_trials = 1;
    cfg.max_trials = 60;
    cfg.seed = 11;
    cfg.keep_frame_detail = true;

    BerSweepResult r = ber_sweep(sys, cfg);
    REQUIRE(r.points.size() == 6); // grid-major, iteration-minor
    const long long frame_bits =
        static_cast<long long>(sys.codewords()) * sys.rs().message_bits();
    for (int g = 0; g < 2; ++g)
        for (int k = 0; k < 3; ++k) {
            const BerPoint& p = r.points[g * 3 + k];
            CHECK(p.eb_n0_db == cfg.eb_n0_grid[g]);
            CHECK(p.iteration == k + 1);
            CHECK(p.trials == 60);
            CHECK(p.total_bits == 60 * frame_bits);
            CHECK(p.ber == doctest::Approx(static_cast<double>(p.bit_errors) /
                                           static_cast<double>(p.total_bits)));
            CHECK(p.fer == doctest::Approx(static_cast<double>(p.frame_errors) / 60.0));
            CHECK(p.frame_errors <= p.trials);
            CHECK(p.ci_low <= p.ber);
            CHECK(p.ber <= p.ci_high);
        }

    // per-frame detail is consistent with the aggregates
    REQUIRE(r.detail.size() == 2);
    for (int g = 0; g < 2; ++g) {
        REQUIRE(r.detail[g].frame_errors.size() == 3);
        for (int k = 0; k < 3; ++k) {
            const auto& fe = r.detail[g].frame_errors[k];
            REQUIRE(fe.size() == 60);
            long long bits = 0, frames = 0;
            for (int e : fe) {
                bits += e;
                if (e > 0) ++frames;
            }
            CHECK(bits == r.points[g * 3 + k].bit_errors);
            CHECK(frames == r.points[g * 3 + k].frame_errors);
        }
    }

    // replaying the config reproduces every number
    BerSweepResult r2 = ber_sweep(sys, cfg);
    REQUIRE(r2.points.size() == r.points.size());
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        CHECK(r2.points[i].bit_errors == r.points[i].bit_errors);
        CHECK(r2.points[i].frame_errors == r.points[i].frame_errors);
        CHECK(r2.points[i].trials == r.points[i].trials);
        CHECK(r2.points[i].ci_low == r.points[i].ci_low);
        CHECK(r2.points[i].ci_high == r.points[i].ci_high);
    }
}

TEST_CASE("error-rate sweep: stopping rules and validation") {
    MarcConfig mc = small_code();
    mc.joint_iterations = 2;
    MarcSystem sys(mc);

    BerConfig cfg;
    cfg.eb_n0_grid = {0.0};
    cfg.min_frame_errors = 1;
    cfg.min_trials = 1;
    cfg.max_trials = 10;
    cfg.batch = 32;
    cfg.seed = 3;
    BerSweepResult r = ber_sweep(sys, cfg);
    CHECK(r.points.front().trials == 10); // batch clipped to the trial budget

    // at 0 dB errors are plentiful: the frame-error target stops the point early
    cfg.max_trials = 4000;
    cfg.batch = 8;
    cfg.min_frame_errors = 5;
    r = ber_sweep(sys, cfg);
    CHECK(r.points.back().trials < 100);
    CHECK(r.points.back().frame_errors >= 5);

    BerConfig bad = cfg;
    bad.eb_n0_grid.clear();
    CHECK_THROWS_AS(ber_sweep(sys, bad), ConfigError);
    bad = cfg;
    bad.min_trials = 0;
    CHECK_THROWS_AS(ber_sweep(sys, bad), ConfigError);
    bad = cfg;
    bad.max_trials = bad.min_trials - 1;
    CHECK_THROWS_AS(ber_sweep(sys, bad), ConfigError);
    bad = cfg;
    bad.batch = 0;
    CHECK_THROWS_AS(ber_sweep(sys, bad), ConfigError);
    bad = cfg;
    bad.min_frame_errors = 0;
    CHECK_THROWS_AS(ber_sweep(sys, bad), ConfigError);
}

TEST_CASE("near-noiseless channel yields zero errors") {
    MarcConfig mc = small_code();
    mc.joint_iterations = 5;
    MarcSystem sys(mc);

    BerConfig cfg;
    cfg.eb_n0_grid = {40.0};
    cfg.min_frame_errors = 1000000000;
    cfg.min_trials = 1;
    cfg.max_trials = 50;
    cfg.seed = 13;
    for (const auto& p : ber_sweep(sys, cfg).points) {
        CHECK(p.bit_errors == 0);
        CHECK(p.frame_errors == 0);
        CHECK(p.ber == 0.0);
    }
}

TEST_CASE("xor baseline sweep reports a single non-iterative curve") {
    MarcSystem sys(small_code());
    BerConfig cfg;
    cfg.eb_n0_grid = {8.0, 10.0};
    cfg.min_frame_errors = 1000000000;
    cfg.min_trials = 1;
    cfg.max_trials = 40;
    cfg.seed = 17;
    cfg.xor_baseline = true;
    BerSweepResult r = ber_sweep(sys, cfg);
    REQUIRE(r.points.size() == 2);
    for (const auto& p : r.points) CHECK(p.iteration == 1);
    CHECK(r.points[0].eb_n0_db == 8.0);
    CHECK(r.points[1].eb_n0_db == 10.0);
}

TEST_CASE("iteration twenty beats iteration one at 7 dB") {
    MarcConfig mc; // (31,25), the main configuration
    mc.relay_mode = RelayMode::Ideal;
    MarcSystem sys(mc);

    BerConfig cfg;
    cfg.eb_n0_grid = {7.0};
    cfg.min_frame_errors = 1000000000;
    cfg.min_trials = 1;
    cfg.max_trials = 150;
    cfg.seed = 1;
    BerSweepResult r = ber_sweep(sys, cfg);
    REQUIRE(r.points.size() == 20);
    CHECK(r.points[19].bit_errors < r.points[0].bit_errors);
    CHECK(r.points[19].iteration == 20);
}
