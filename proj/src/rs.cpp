#include "marc/rs.hpp"

#include <algorithm>

#include "marc/errors.hpp"

namespace marc {

RsCode::RsCode(Field field, int k, int first_root)
    : field_(std::move(field)), n_(field_.order()), k_(k), t_((n_ - k) / 2), b_(first_root) {
    if (k_ <= 0 || k_ >= n_) throw ConfigError("RS code requires 0 < K < N");
    // generator g(x) = prod_{j=0}^{N-K-1} (x - alpha^(b+j))
    generator_ = Poly{{1}};
    for (int j = 0; j < n_ - k_; ++j) {
        Symbol root = field_.alpha_pow(b_ + j);
        generator_ = poly_mul(field_, generator_, Poly{{root, 1}});
    }
}

std::vector<Symbol> RsCode::encode(const std::vector<Symbol>& message) const {
    if (static_cast<int>(message.size()) != k_)
        throw LengthMismatch("rs_encode: message length != K");
    // Sequence position i carries the coefficient of x^(N-1-i), so the
    // message occupies the top K degrees and comes first on the wire.
    // Parity = (M(x) * x^(N-K)) mod g(x), computed by synthetic division.
    std::vector<Symbol> rem(n_ - k_, 0);
    for (int u = 0; u < k_; ++u) {
        Symbol feedback = Field::add(message[u], rem[0]);
        for (int j = 0; j < n_ - k_ - 1; ++j)
            rem[j] = Field::add(rem[j + 1], field_.mul(feedback, generator_.c[n_ - k_ - 1 - j]));
        rem[n_ - k_ - 1] = field_.mul(feedback, generator_.c[0]);
    }
    std::vector<Symbol> cw(message);
    cw.insert(cw.end(), rem.begin(), rem.end());
    return cw;
}

std::vector<Symbol> RsCode::syndromes(const std::vector<Symbol>& word) const {
    std::vector<Symbol> s(n_ - k_);
    for (int j = 0; j < n_ - k_; ++j) {
        // S_j = sum_i word[i] * alpha^((b+j)*(N-1-i)) via Horner in wire order.
        Symbol x = field_.alpha_pow(b_ + j);
        Symbol acc = 0;
        for (int i = 0; i < n_; ++i) acc = Field::add(field_.mul(acc, x), word[i]);
        s[j] = acc;
    }
    return s;
}

bool RsCode::is_codeword(const std::vector<Symbol>& word) const {
    auto s = syndromes(word);
    return std::all_of(s.begin(), s.end(), [](Symbol v) { return v == 0; });
}

std::optional<RsCode::Decoded> RsCode::bm_decode(const std::vector<Symbol>& received) const {
    if (static_cast<int>(received.size()) != n_)
        throw LengthMismatch("bm_decode: received length != N");
    auto synd = syndromes(received);
    if (std::all_of(synd.begin(), synd.end(), [](Symbol v) { return v == 0; }))
        return Decoded{std::vector<Symbol>(received.begin(), received.begin() + k_), 0};

    // Berlekamp-Massey iteration for the error locator sigma(x).
    int two_t = n_ - k_;
    Poly sigma{{1}}, prev{{1}};
    int l = 0, shift = 1;
    Symbol prev_d = 1;
    for (int n = 0; n < two_t; ++n) {
        Symbol d = synd[n];
        for (int i = 1; i <= l && i < static_cast<int>(sigma.c.size()); ++i)
            d = Field::add(d, field_.mul(sigma.c[i], synd[n - i]));
        if (d == 0) {
            ++shift;
            continue;
        }
        Poly shifted;
        shifted.c.assign(shift, 0);
        shifted.c.insert(shifted.c.end(), prev.c.begin(), prev.c.end());
        Poly correction = poly_scale(field_, shifted, field_.div(d, prev_d));
        if (2 * l <= n) {
            Poly keep = sigma;
            sigma = poly_add(sigma, correction);
            l = n + 1 - l;
            prev = keep;
            prev_d = d;
            shift = 1;
        } else {
            sigma = poly_add(sigma, correction);
            ++shift;
        }
    }
    if (l > t_ || sigma.degree() != l) return std::nullopt;

    // Chien search over the wire positions; error at position i has
    // locator X = alpha^(N-1-i), a root of sigma at X^-1.
    std::vector<int> error_pos;
    std::vector<Symbol> error_loc;
    for (int i = 0; i < n_; ++i) {
        Symbol x_inv = field_.alpha_pow(-(n_ - 1 - i));
        if (poly_eval(field_, sigma, x_inv) == 0) {
            error_pos.push_back(i);
            error_loc.push_back(field_.alpha_pow(n_ - 1 - i));
        }
    }
    if (static_cast<int>(error_pos.size()) != l) return std::nullopt;

    // Forney: e = X^(1-b) * Omega(X^-1) / sigma'(X^-1), Omega = S*sigma mod x^2t.
    Poly s_poly;
    s_poly.c = synd;
    s_poly.trim();
    Poly omega = poly_mod_xk(poly_mul(field_, s_poly, sigma), two_t);
    Poly sigma_deriv = poly_formal_derivative(sigma);

    std::vector<Symbol> corrected(received);
    for (size_t e = 0; e < error_pos.size(); ++e) {
        Symbol x = error_loc[e];
        Symbol x_inv = field_.inv(x);
        Symbol denom = poly_eval(field_, sigma_deriv, x_inv);
        if (denom == 0) return std::nullopt;
        Symbol num = poly_eval(field_, omega, x_inv);
        Symbol mag = field_.mul(num, field_.inv(denom));
        if (b_ != 1) mag = field_.mul(mag, field_.alpha_pow(static_cast<long long>(1 - b_) * field_.log(x)));
        if (mag == 0) return std::nullopt;
        corrected[error_pos[e]] = Field::add(corrected[error_pos[e]], mag);
    }
    if (!is_codeword(corrected)) return std::nullopt;
    return Decoded{std::vector<Symbol>(corrected.begin(), corrected.begin() + k_),
                   static_cast<int>(error_pos.size())};
}

BinaryParityCheck RsCode::binary_parity_check() const {
    int m = field_.m();
    BitMatrix h((n_ - k_) * m, n_ * m);
    for (int j = 0; j < n_ - k_; ++j) {
        for (int i = 0; i < n_; ++i) {
            // Symbol-level entry alpha^((b+j)*(N-1-i)); its companion matrix
            // has column k equal to the bits of entry * alpha^k.
            Symbol entry = field_.alpha_pow(static_cast<long long>(b_ + j) * (n_ - 1 - i));
            for (int col = 0; col < m; ++col) {
                Symbol v = field_.mul(entry, field_.alpha_pow(col));
                for (int row = 0; row < m; ++row)
                    if ((v >> row) & 1) h.set(j * m + row, i * m + col, true);
            }
        }
    }
    return BinaryParityCheck{std::move(h)};
}

std::vector<std::uint8_t> symbols_to_bits(int m, const std::vector<Symbol>& symbols) {
    std::vector<std::uint8_t> bits(symbols.size() * m);
    for (size_t i = 0; i < symbols.size(); ++i)
        for (int k = 0; k < m; ++k) bits[i * m + k] = (symbols[i] >> k) & 1;
    return bits;
}

std::vector<Symbol> bits_to_symbols(int m, const std::vector<std::uint8_t>& bits) {
    if (bits.size() % m != 0) throw LengthMismatch("bits_to_symbols: length not a multiple of m");
    std::vector<Symbol> out(bits.size() / m, 0);
    for (size_t i = 0; i < out.size(); ++i)
        for (int k = 0; k < m; ++k)
            if (bits[i * m + k]) out[i] = static_cast<Symbol>(out[i] | (1u << k));
    return out;
}

} // namespace marc
