#ifndef MARC_GF_HPP
#define MARC_GF_HPP

#include <cstdint>
#include <vector>

#include "marc/errors.hpp"

namespace marc {

// One element of GF(2^m), stored as an integer in [0, 2^m) whose bit k is
// the coefficient of alpha^k (LSB-first basis convention, used everywhere
// including the symbol<->bit expansion of codewords).
using Symbol = std::uint16_t;

// GF(2^m) arithmetic context. Tables are built once at construction;
// the object is immutable afterwards and safe to share across threads.
class Field {
  public:
    // Throws NonPrimitivePolynomial unless alpha = 2 generates the full
    // multiplicative group under reduction by primitive_poly.
    Field(int m, std::uint32_t primitive_poly);

    int m() const { return m_; }
    std::uint32_t primitive_poly() const { return poly_; }
    int size() const { return q_; }           // 2^m
    int order() const { return q_ - 1; }      // multiplicative group order, N = 2^m - 1

    static Symbol add(Symbol a, Symbol b) { return a ^ b; }

    Symbol mul(Symbol a, Symbol b) const {
        if (a == 0 || b == 0) return 0;
        return alog_[log_[a] + log_[b]]; // alog table is doubled, no mod needed
    }

    Symbol inv(Symbol a) const {
        if (a == 0) throw DivisionByZero("inv(0) in GF(2^m)");
        return alog_[q_ - 1 - log_[a]];
    }

    Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

    // alpha^e for any integer exponent (negative allowed).
    Symbol alpha_pow(long long e) const {
        long long n = q_ - 1;
        long long r = e % n;
        if (r < 0) r += n;
        return alog_[r];
    }

    int log(Symbol a) const {
        if (a == 0) throw DivisionByZero("log(0) in GF(2^m)");
        return log_[a];
    }

  private:
    int m_;
    int q_;
    std::uint32_t poly_;
    std::vector<int> log_;      // size 2^m, log_[0] unused
    std::vector<Symbol> alog_;  // size 2*(2^m-1), doubled for mod-free multiply
};

// Polynomial over GF(2^m), coefficients lowest degree first,
// no trailing zeros (the zero polynomial has an empty vector).
struct Poly {
    std::vector<Symbol> c;

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; } // -1 for zero poly

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
};

Symbol poly_eval(const Field& f, const Poly& p, Symbol x);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Field& f, const Poly& a, const Poly& b);
Poly poly_scale(const Field& f, const Poly& a, Symbol s);
Poly poly_mod_xk(const Poly& a, int k);   // a mod x^k
Poly poly_formal_derivative(const Poly& a); // char-2 derivative: odd-degree terms shift down

} // namespace marc

#endif
