#include "doctest.h"

#include <cmath>
#include <set>

#include "marc/rng.hpp"

using namespace marc;

TEST_CASE("derive_seed separates streams and is order-sensitive") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 8; ++a)
        for (std::uint64_t b = 0; b < 8; ++b)
            for (std::uint64_t c = 0; c < 8; ++c) seen.insert(derive_seed(1, a, b, c));
    CHECK(seen.size() == 8 * 8 * 8);
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
    CHECK(derive_seed(5, 1) == derive_seed(5, 1, 0, 0));
}

TEST_CASE("same seed reproduces the stream exactly") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(42);
    for (int i = 0; i < 1000; ++i) CHECK(c.gaussian() == d.gaussian());
}

TEST_CASE("uniform stays in [0,1) and has the right mean") {
    Rng rng(7);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gaussian moments") {
    Rng rng(11);
    double s1 = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double g = rng.gaussian();
        s1 += g;
        s2 += g * g;
    }
    // mean std error ~ 1/sqrt(n) = 0.0022
    CHECK(std::fabs(s1 / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cgaussian has the requested total variance per complex sample") {
    Rng rng(13);
    double p = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) p += std::norm(rng.cgaussian(2.0));
    CHECK(p / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("uniform_int respects the bound") {
    Rng rng(17);
    long long counts[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 50000; ++i) {
        auto v = rng.uniform_int(5);
        REQUIRE(v < 5);
        ++counts[v];
    }
    for (long long c : counts) CHECK(c > 50000 / 5 - 600);
}
