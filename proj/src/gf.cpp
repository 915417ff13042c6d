#include "marc/gf.hpp"

namespace marc {

Field::Field(int m, std::uint32_t primitive_poly) : m_(m), q_(1 << m), poly_(primitive_poly) {
    if (m < 2 || m > 12) throw Error("field degree m must be in [2, 12]");
    if ((primitive_poly >> m) != 1u)
        throw Error("primitive polynomial must have degree m exactly");
    if ((primitive_poly & 1u) == 0)
        throw NonPrimitivePolynomial("polynomial with zero constant term is divisible by x");

    log_.assign(q_, -1);
    alog_.assign(2 * (q_ - 1), 0);

    // Walk powers of alpha = 2 with shift-and-reduce. If the cycle closes
    // before covering all 2^m - 1 nonzero elements, alpha is not a generator.
    std::uint32_t x = 1;
    for (int i = 0; i < q_ - 1; ++i) {
        if (log_[x] != -1) {
            throw NonPrimitivePolynomial("alpha = 2 has order " + std::to_string(i) +
                                         " < " + std::to_string(q_ - 1));
        }
        log_[x] = i;
        alog_[i] = static_cast<Symbol>(x);
        alog_[i + q_ - 1] = static_cast<Symbol>(x);
        x <<= 1;
        if (x & static_cast<std::uint32_t>(q_)) x ^= primitive_poly;
    }
    if (x != 1)
        throw NonPrimitivePolynomial("alpha^'(2^m-1)' != 1: polynomial is not primitive");
}

Symbol poly_eval(const Field& f, const Poly& p, Symbol x) {
    Symbol acc = 0;
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = Field::add(f.mul(acc, x), *it);
    return acc;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] ^= a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] ^= b.c[i];
    r.trim();
    return r;
}

Poly poly_mul(const Field& f, const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] ^= f.mul(a.c[i], b.c[j]);
    }
    r.trim();
    return r;
}

Poly poly_scale(const Field& f, const Poly& a, Symbol s) {
    if (s == 0) return {};
    Poly r = a;
    for (auto& v : r.c) v = f.mul(v, s);
    return r;
}

Poly poly_mod_xk(const Poly& a, int k) {
    Poly r = a;
    if (static_cast<int>(r.c.size()) > k) r.c.resize(k);
    r.trim();
    return r;
}

Poly poly_formal_derivative(const Poly& a) {
    // In characteristic 2, d/dx sum c_i x^i = sum_{i odd} c_i x^(i-1).
    Poly r;
    if (a.c.size() <= 1) return r;
    r.c.assign(a.c.size() - 1, 0);
    for (size_t i = 1; i < a.c.size(); i += 2) r.c[i - 1] = a.c[i];
    r.trim();
    return r;
}

} // namespace marc
