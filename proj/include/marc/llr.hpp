#ifndef MARC_LLR_HPP
#define MARC_LLR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace marc {

// L = log P(b=0)/P(b=1) throughout; positive means bit 0.
inline std::uint8_t hard_bit(double llr) { return llr < 0.0 ? 1 : 0; }

inline std::vector<std::uint8_t> hard_bits(const std::vector<double>& llrs) {
    std::vector<std::uint8_t> out(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i) out[i] = hard_bit(llrs[i]);
    return out;
}

inline double clip_llr(double x, double clip) { return std::clamp(x, -clip, clip); }

// LLR of the XOR of two bits, computed in a numerically safe form:
// sign(a)sign(b)min(|a|,|b|) + log1p(e^-|a+b|) - log1p(e^-|a-b|).
inline double boxplus(double a, double b) {
    double sgn = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
    double m = sgn * std::min(std::fabs(a), std::fabs(b));
    return m + std::log1p(std::exp(-std::fabs(a + b))) - std::log1p(std::exp(-std::fabs(a - b)));
}

} // namespace marc

#endif
