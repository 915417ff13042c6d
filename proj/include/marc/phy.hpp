#ifndef MARC_PHY_HPP
#define MARC_PHY_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "marc/rng.hpp"

namespace marc {

using Complex = std::complex<double>;

// bit 0 -> +1, bit 1 -> -1
inline Complex bpsk_map_bit(std::uint8_t bit) { return {bit ? -1.0 : 1.0, 0.0}; }
std::vector<Complex> bpsk_map(const std::vector<std::uint8_t>& bits);

// LLR of a single BPSK observation y = h*s + n with perfect CSI:
// (|y + h|^2 - |y - h|^2) / N0, identically 4*Re(h^* y)/N0.
inline double llr_demod(Complex y, Complex h, double n0) {
    return (std::norm(y + h) - std::norm(y - h)) / n0;
}

// Alamouti pair for the retransmission phase: slot 3 carries -s2^*,
// slot 4 carries s1^*.
inline std::pair<Complex, Complex> alamouti_encode(Complex s1, Complex s2) {
    return {-std::conj(s2), std::conj(s1)};
}

// Matched-filter combining of the two receive instants:
//   y1 = h1 s1 + h2 s2 + n1,   y2 = -h1 s2^* + h2 s1^* + n2.
// Each combined statistic carries gain (|h1|^2 + |h2|^2) and noise of
// variance (|h1|^2 + |h2|^2) N0, so the LLR is 4 Re(s~)/N0.
std::pair<double, double> alamouti_soft_decode(Complex y1, Complex y2, Complex h1, Complex h2,
                                               double n0);

// One Rayleigh coefficient per (row, link), CN(0, 1): E{|h|^2} = 1,
// constant for a whole packet row.
std::vector<std::vector<Complex>> rayleigh_block_fading(int rows, int links, Rng& rng);

// In-place complex AWGN of total variance n0 (n0/2 per real dimension).
void awgn(std::vector<Complex>& samples, double n0, Rng& rng);

inline Complex awgn_sample(double n0, Rng& rng) { return rng.cgaussian(n0); }

// N0 for a unit-energy BPSK symbol at the given Eb/N0 and code rate:
// Es/N0 = rate * Eb/N0.
inline double n0_from_ebn0_db(double eb_n0_db, double rate) {
    return 1.0 / (rate * std::pow(10.0, eb_n0_db / 10.0));
}

} // namespace marc

#endif
