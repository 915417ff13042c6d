#ifndef MARC_RS_HPP
#define MARC_RS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "marc/bitmat.hpp"
#include "marc/gf.hpp"

namespace marc {

// Binary image of the symbol-level parity-check matrix: (N-K)*m rows by
// N*m columns, obtained by replacing each GF(2^m) entry with its
// multiplication (companion) matrix. Annihilates the bit expansion of
// every codeword.
struct BinaryParityCheck {
    BitMatrix matrix;
};

// Systematic (N, K) Reed-Solomon code over GF(2^m), N = 2^m - 1.
// Codewords are symbol sequences with the message in the first K
// positions. First generator root exponent is b = 1 (narrow sense).
class RsCode {
  public:
    RsCode(Field field, int k, int first_root = 1);

    const Field& field() const { return field_; }
    int n() const { return n_; }
    int k() const { return k_; }
    int t() const { return t_; }
    int first_root() const { return b_; }
    int codeword_bits() const { return n_ * field_.m(); }
    int message_bits() const { return k_ * field_.m(); }

    std::vector<Symbol> encode(const std::vector<Symbol>& message) const;

    struct Decoded {
        std::vector<Symbol> message;
        int corrected;
    };
    // Hard-decision Berlekamp-Massey decoding. Empty on failure; note a
    // miscorrection to a different codeword cannot be detected and is
    // returned as success.
    std::optional<Decoded> bm_decode(const std::vector<Symbol>& received) const;

    // Syndromes S_j = C(alpha^(b+j)), j = 0 .. N-K-1. All zero iff the
    // word is a codeword.
    std::vector<Symbol> syndromes(const std::vector<Symbol>& word) const;
    bool is_codeword(const std::vector<Symbol>& word) const;

    BinaryParityCheck binary_parity_check() const;

  private:
    Field field_;
    int n_, k_, t_, b_;
    Poly generator_;
};

// LSB-first expansion: bit k of a symbol is the coefficient of alpha^k.
std::vector<std::uint8_t> symbols_to_bits(int m, const std::vector<Symbol>& symbols);
std::vector<Symbol> bits_to_symbols(int m, const std::vector<std::uint8_t>& bits);

} // namespace marc

#endif
