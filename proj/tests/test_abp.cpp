#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "marc/abp.hpp"
#include "marc/errors.hpp"
#include "marc/gf.hpp"
#include "marc/llr.hpp"
#include "marc/rng.hpp"
#include "marc/rs.hpp"

using namespace marc;

namespace {

std::vector<Symbol> random_message(const RsCode& code, Rng& rng) {
    std::vector<Symbol> msg(code.k());
    for (auto& s : msg) s = static_cast<Symbol>(rng.uniform_int(code.field().size()));
    return msg;
}

std::vector<double> bits_to_llrs(const std::vector<std::uint8_t>& bits, double mag) {
    std::vector<double> llr(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) llr[i] = bits[i] ? -mag : mag;
    return llr;
}

} // namespace

TEST_CASE("adapt_parity_matrix pivots the least reliable columns to identity") {
    RsCode code(Field(4, 0x13), 7);
    const BitMatrix& h = code.binary_parity_check().matrix;
    Rng rng(3301);

    std::vector<int> order(h.cols());
    for (int i = 0; i < h.cols(); ++i) order[i] = i;
    for (int i = h.cols() - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);

    std::vector<int> pivots;
    BitMatrix a = adapt_parity_matrix(h, order, &pivots);
    CHECK(static_cast<int>(pivots.size()) == h.rows()); // full rank: one pivot per row
    CHECK(a.rank() == h.rank());

    // Each pivot column is a unit vector.
    for (int c : pivots) {
        int weight = 0;
        for (int r = 0; r < a.rows(); ++r) weight += a.get(r, c);
        CHECK(weight == 1);
    }

    // Row operations preserve the null space: codewords still check out.
    for (int trial = 0; trial < 20; ++trial) {
        auto cw = code.encode(random_message(code, rng));
        auto bits = symbols_to_bits(code.field().m(), cw);
        CHECK(a.mul_vec_is_zero(bits));
    }

    CHECK_THROWS_AS(adapt_parity_matrix(h, std::vector<int>{0, 1, 2}), LengthMismatch);
}

TEST_CASE("spa_extrinsic on a single check equals boxplus of the others") {
    BitMatrix h(1, 3);
    h.set(0, 0, 1);
    h.set(0, 1, 1);
    h.set(0, 2, 1);
    std::vector<double> q = {1.2, -0.7, 2.4};
    auto ext = spa_extrinsic(h, q);
    CHECK(ext[0] == doctest::Approx(boxplus(q[1], q[2])).epsilon(1e-9));
    CHECK(ext[1] == doctest::Approx(boxplus(q[0], q[2])).epsilon(1e-9));
    CHECK(ext[2] == doctest::Approx(boxplus(q[0], q[1])).epsilon(1e-9));

    auto damped = spa_extrinsic(h, q, 0.25);
    for (int i = 0; i < 3; ++i) CHECK(damped[i] == doctest::Approx(0.25 * ext[i]).epsilon(1e-12));

    // Independent checks accumulate per column.
    BitMatrix h2(2, 3);
    h2.set(0, 0, 1);
    h2.set(0, 1, 1);
    h2.set(1, 0, 1);
    h2.set(1, 2, 1);
    auto e2 = spa_extrinsic(h2, q);
    CHECK(e2[0] == doctest::Approx(q[1] + q[2]).epsilon(1e-9)); // degree-2 checks pass the LLR through

    CHECK_THROWS_AS(spa_extrinsic(h, std::vector<double>{1.0}), LengthMismatch);
}

TEST_CASE("abp accepts a clean word immediately") {
    RsCode code(Field(4, 0x13), 7);
    AbpDecoder dec(code);
    Rng rng(3302);
    auto msg = random_message(code, rng);
    auto bits = symbols_to_bits(4, code.encode(msg));
    auto res = dec.decode(bits_to_llrs(bits, 6.0));
    CHECK(res.parity_satisfied);
    REQUIRE(res.decoded.has_value());
    CHECK(*res.decoded == msg);
    CHECK(res.hard == bits);

    // Splitting the same evidence between channel and prior changes nothing.
    auto half = bits_to_llrs(bits, 3.0);
    auto res2 = dec.decode(half, half);
    CHECK(res2.parity_satisfied);
    CHECK(*res2.decoded == msg);
}

TEST_CASE("abp corrects beyond the algebraic radius when wrong bits are unreliable") {
    RsCode code(Field(4, 0x13), 7); // (15,7), t = 4
    AbpDecoder dec(code);
    Rng rng(3303);
    int abp_ok = 0, bm_ok = 0;
    const int trials = 25;
    for (int trial = 0; trial < trials; ++trial) {
        auto msg = random_message(code, rng);
        auto bits = symbols_to_bits(4, code.encode(msg));
        auto llr = bits_to_llrs(bits, 8.0);
        // Five wrong symbols (one weak flipped bit each) exceed t.
        std::vector<int> syms;
        while (syms.size() < 5) {
            int s = rng.uniform_int(15);
            bool dup = false;
            for (int x : syms) dup |= (x == s);
            if (!dup) syms.push_back(s);
        }
        for (int s : syms) {
            int bit = 4 * s + rng.uniform_int(4);
            llr[bit] = bits[bit] ? 0.5 : -0.5; // wrong sign, low confidence
        }
        auto hard = hard_bits(llr);
        auto bm = code.bm_decode(bits_to_symbols(4, hard));
        if (bm && bm->message == msg) ++bm_ok;
        auto res = dec.decode(llr);
        if (res.decoded && *res.decoded == msg) ++abp_ok;
    }
    CHECK(bm_ok == 0); // five symbol errors are past the (15,7) radius
    CHECK(abp_ok >= 23);
}

TEST_CASE("abp falls back to algebraic decoding when belief propagation stalls") {
    RsCode code(Field(4, 0x13), 7);
    AbpDecoder dec(code, AbpConfig{1, 0.1, 30.0});
    Rng rng(3304);
    auto msg = random_message(code, rng);
    auto cw = code.encode(msg);
    auto bits = symbols_to_bits(4, cw);
    auto llr = bits_to_llrs(bits, 8.0);
    // Two confidently wrong symbols: one damped SPA round cannot flip them,
    // but Berlekamp-Massey on the hard decisions can.
    for (int s : {2, 9})
        for (int b = 0; b < 4; ++b) llr[4 * s + b] = -llr[4 * s + b];
    auto res = dec.decode(llr);
    CHECK(!res.parity_satisfied);
    REQUIRE(res.decoded.has_value());
    CHECK(*res.decoded == msg);
}

TEST_CASE("abp early exit makes extra inner iterations free") {
    RsCode code(Field(4, 0x13), 7);
    Rng rng(3305);
    auto msg = random_message(code, rng);
    auto bits = symbols_to_bits(4, code.encode(msg));
    auto llr = bits_to_llrs(bits, 5.0);
    auto one = AbpDecoder(code, AbpConfig{1, 0.1, 30.0}).decode(llr);
    auto many = AbpDecoder(code, AbpConfig{50, 0.1, 30.0}).decode(llr);
    CHECK(one.parity_satisfied);
    CHECK(many.parity_satisfied);
    CHECK(one.extrinsic == many.extrinsic);
    CHECK(one.hard == many.hard);
}

TEST_CASE("abp output respects the clip and validates its inputs") {
    RsCode code(Field(4, 0x13), 7);
    AbpConfig cfg;
    cfg.llr_clip = 4.0;
    AbpDecoder dec(code, cfg);
    Rng rng(3306);
    std::vector<double> llr(code.codeword_bits());
    for (auto& x : llr) x = 3.0 * rng.gaussian();
    auto res = dec.decode(llr);
    for (double e : res.extrinsic) CHECK(std::fabs(e) <= 4.0 + 1e-12);
    REQUIRE(res.hard.size() == llr.size());

    CHECK_THROWS_AS(dec.decode(std::vector<double>(5, 0.0)), LengthMismatch);
    CHECK_THROWS_AS(dec.decode(llr, std::vector<double>(5, 0.0)), LengthMismatch);
    CHECK_THROWS_AS(AbpDecoder(code, AbpConfig{0, 0.1, 30.0}), ConfigError);
    CHECK_THROWS_AS(AbpDecoder(code, AbpConfig{10, 0.0, 30.0}), ConfigError);
    CHECK_THROWS_AS(AbpDecoder(code, AbpConfig{10, 1.5, 30.0}), ConfigError);
    CHECK_THROWS_AS(AbpDecoder(code, AbpConfig{10, 0.1, -1.0}), ConfigError);
}
