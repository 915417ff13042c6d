#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "marc/phy.hpp"
#include "marc/rng.hpp"

using namespace marc;

TEST_CASE("bpsk mapping and scalar demodulation") {
    CHECK(bpsk_map_bit(0) == Complex{1.0, 0.0});
    CHECK(bpsk_map_bit(1) == Complex{-1.0, 0.0});
    auto s = bpsk_map({0, 1, 1, 0});
    CHECK(s.size() == 4);
    CHECK(s[0].real() == 1.0);
    CHECK(s[1].real() == -1.0);

    CHECK(llr_demod({1.0, 0.0}, {1.0, 0.0}, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(llr_demod({-1.0, 0.0}, {1.0, 0.0}, 1.0) == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(llr_demod({1.0, 0.0}, {1.0, 0.0}, 2.0) == doctest::Approx(2.0).epsilon(1e-12));

    // The two-norm difference form equals the matched-filter form.
    Rng rng(2201);
    for (int i = 0; i < 200; ++i) {
        Complex y = rng.cgaussian(2.0), h = rng.cgaussian(1.0);
        double n0 = 0.25 + rng.uniform();
        double want = 4.0 * (std::conj(h) * y).real() / n0;
        CHECK(llr_demod(y, h, n0) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("alamouti pair is orthogonal by construction") {
    Rng rng(2202);
    for (int i = 0; i < 100; ++i) {
        Complex s1 = rng.cgaussian(1.0), s2 = rng.cgaussian(1.0);
        auto [t3, t4] = alamouti_encode(s1, s2);
        CHECK(t3 == -std::conj(s2));
        CHECK(t4 == std::conj(s1));
        // Columns of [s1 s2; -s2* s1*] have zero inner product and equal norm.
        Complex ip = s1 * std::conj(s2) + t3 * std::conj(t4);
        CHECK(std::abs(ip) < 1e-12);
        double n1 = std::norm(s1) + std::norm(t3);
        double n2 = std::norm(s2) + std::norm(t4);
        CHECK(n1 == doctest::Approx(n2).epsilon(1e-12));
    }
}

TEST_CASE("alamouti combining separates both symbols without noise") {
    Rng rng(2203);
    for (int trial = 0; trial < 50; ++trial) {
        Complex h1 = rng.cgaussian(1.0), h2 = rng.cgaussian(1.0);
        double n0 = 0.5;
        double gain = std::norm(h1) + std::norm(h2);
        for (int b = 0; b < 4; ++b) {
            Complex s1 = bpsk_map_bit(b & 1), s2 = bpsk_map_bit((b >> 1) & 1);
            Complex y1 = h1 * s1 + h2 * s2;
            Complex y2 = -h1 * std::conj(s2) + h2 * std::conj(s1);
            auto [l1, l2] = alamouti_soft_decode(y1, y2, h1, h2, n0);
            CHECK(l1 == doctest::Approx(4.0 * gain * s1.real() / n0).epsilon(1e-10));
            CHECK(l2 == doctest::Approx(4.0 * gain * s2.real() / n0).epsilon(1e-10));
        }
    }
}

TEST_CASE("alamouti llr statistics match the diversity-combined channel") {
    Rng rng(2204);
    Complex h1{0.8, 0.3}, h2{-0.5, 0.4};
    double n0 = 0.5;
    double gain = std::norm(h1) + std::norm(h2);
    Complex s1{1.0, 0.0}, s2{-1.0, 0.0};
    int n = 20000;
    double sum1 = 0.0, sum2 = 0.0, sq1 = 0.0;
    for (int i = 0; i < n; ++i) {
        Complex y1 = h1 * s1 + h2 * s2 + rng.cgaussian(n0);
        Complex y2 = -h1 * std::conj(s2) + h2 * std::conj(s1) + rng.cgaussian(n0);
        auto [l1, l2] = alamouti_soft_decode(y1, y2, h1, h2, n0);
        sum1 += l1;
        sum2 += l2;
        sq1 += l1 * l1;
    }
    double mean1 = sum1 / n, mean2 = sum2 / n;
    double var1 = sq1 / n - mean1 * mean1;
    // E{L} = +-4G/N0 and Var{L} = 8G/N0 = 2|E{L}|: the combined LLR is
    // consistent-Gaussian, exactly what the EXIT machinery assumes.
    CHECK(mean1 == doctest::Approx(4.0 * gain / n0).epsilon(0.02));
    CHECK(mean2 == doctest::Approx(-4.0 * gain / n0).epsilon(0.02));
    CHECK(var1 == doctest::Approx(8.0 * gain / n0).epsilon(0.05));
}

TEST_CASE("rayleigh block fading is unit power") {
    Rng rng(2205);
    int rows = 4000, links = 2;
    auto h = rayleigh_block_fading(rows, links, rng);
    REQUIRE(h.size() == static_cast<size_t>(rows));
    REQUIRE(h[0].size() == static_cast<size_t>(links));
    double power = 0.0;
    Complex mean{0.0, 0.0};
    for (const auto& row : h)
        for (const auto& c : row) {
            power += std::norm(c);
            mean += c;
        }
    power /= rows * links;
    mean /= static_cast<double>(rows * links);
    CHECK(power == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(mean) < 0.03);
}

TEST_CASE("awgn adds the requested complex noise power") {
    Rng rng(2206);
    int n = 20000;
    double n0 = 0.8;
    std::vector<Complex> x(n, Complex{1.0, -1.0});
    awgn(x, n0, rng);
    double vre = 0.0, vim = 0.0;
    for (const auto& c : x) {
        vre += (c.real() - 1.0) * (c.real() - 1.0);
        vim += (c.imag() + 1.0) * (c.imag() + 1.0);
    }
    CHECK(vre / n == doctest::Approx(n0 / 2.0).epsilon(0.05));
    CHECK(vim / n == doctest::Approx(n0 / 2.0).epsilon(0.05));
}

TEST_CASE("noise level follows Eb/N0 and rate") {
    CHECK(n0_from_ebn0_db(0.0, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(n0_from_ebn0_db(10.0, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(n0_from_ebn0_db(3.0, 0.4) > n0_from_ebn0_db(4.0, 0.4));
    // 10 dB = one decade at fixed rate.
    CHECK(n0_from_ebn0_db(2.0, 0.4) == doctest::Approx(10.0 * n0_from_ebn0_db(12.0, 0.4)).epsilon(1e-12));
}
