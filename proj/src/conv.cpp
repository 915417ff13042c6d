#include "marc/conv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace marc {

namespace {

unsigned octal_to_bits(unsigned octal) {
    unsigned bits = 0, shift = 0;
    while (octal) {
        bits |= (octal % 10) << shift;
        octal /= 10;
        shift += 3;
    }
    return bits;
}

int highest_bit(unsigned v) {
    int b = -1;
    while (v) {
        ++b;
        v >>= 1;
    }
    return b;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// max*(a, b) = log(e^a + e^b), exact.
inline double max_star(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = std::max(a, b);
    return hi + std::log1p(std::exp(-std::abs(a - b)));
}

} // namespace

ConvCode::ConvCode(unsigned feedback_octal, unsigned feedforward_octal)
    : fb_octal_(feedback_octal), ff_octal_(feedforward_octal),
      fb_bits_(octal_to_bits(feedback_octal)), ff_bits_(octal_to_bits(feedforward_octal)) {
    if (fb_bits_ == 0 || ff_bits_ == 0) throw ConfigError("convolutional generator must be nonzero");
    if ((fb_bits_ & 1u) == 0)
        throw ConfigError("feedback polynomial needs a nonzero D^0 term");
    memory_ = std::max(highest_bit(fb_bits_), highest_bit(ff_bits_));
    if (memory_ < 1) throw ConfigError("convolutional code needs memory >= 1");
    if (memory_ > 16) throw ConfigError("convolutional memory > 16 unsupported");

    // State bit k-1 holds the feedback bit from k steps ago.
    next_.resize(2 * num_states());
    out_.resize(2 * num_states());
    for (int s = 0; s < num_states(); ++s) {
        for (int u = 0; u <= 1; ++u) {
            int a = u;
            for (int k = 1; k <= memory_; ++k)
                if ((fb_bits_ >> k) & 1u) a ^= (s >> (k - 1)) & 1;
            int p = (ff_bits_ & 1u) ? a : 0;
            for (int k = 1; k <= memory_; ++k)
                if ((ff_bits_ >> k) & 1u) p ^= (s >> (k - 1)) & 1;
            next_[2 * s + u] = ((s << 1) | a) & (num_states() - 1);
            out_[2 * s + u] = p;
        }
    }
}

std::vector<std::uint8_t> ConvCode::encode_parity(const std::vector<std::uint8_t>& bits) const {
    if (bits.empty()) throw LengthMismatch("rscc_encode: empty input");
    std::vector<std::uint8_t> parity(bits.size());
    int state = 0;
    for (size_t i = 0; i < bits.size(); ++i) {
        parity[i] = static_cast<std::uint8_t>(parity_bit(state, bits[i]));
        state = next_state(state, bits[i]);
    }
    return parity;
}

PuncturePattern::PuncturePattern(std::vector<std::uint8_t> mask_bits) : mask(std::move(mask_bits)) {
    if (mask.empty()) throw ConfigError("puncture mask must be nonempty");
    if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b == 0; }))
        throw ConfigError("puncture mask must keep at least one position");
}

int PuncturePattern::survivors(int length) const {
    int n = 0;
    for (int i = 0; i < length; ++i)
        if (keeps(i)) ++n;
    return n;
}

std::vector<double> depuncture(const std::vector<double>& llr, const PuncturePattern& p,
                               int full_length) {
    if (p.survivors(full_length) != static_cast<int>(llr.size()))
        throw LengthMismatch("depuncture: survivor count does not match target length");
    std::vector<double> out(full_length, 0.0);
    size_t j = 0;
    for (int i = 0; i < full_length; ++i)
        if (p.keeps(i)) out[i] = llr[j++];
    return out;
}

SisoOutput bcjr_decode(const ConvCode& code, const std::vector<double>& systematic_llr,
                       const std::vector<double>& parity_llr,
                       const std::vector<double>& prior_llr) {
    const size_t len = systematic_llr.size();
    if (prior_llr.size() != len || parity_llr.size() != len)
        throw LengthMismatch("bcjr_decode: input lengths disagree");
    const int ns = code.num_states();

    // Branch metric: gamma = x_u * (Lsys + Lprior)/2 + x_p * Lpar/2,
    // with the bit-0 -> +1 sign convention.
    auto gamma = [&](size_t t, int s, int u) {
        double g = (u == 0 ? 0.5 : -0.5) * (systematic_llr[t] + prior_llr[t]);
        g += (code.parity_bit(s, u) == 0 ? 0.5 : -0.5) * parity_llr[t];
        return g;
    };

    // Forward: encoder starts in state 0. Backward: unterminated trellis,
    // uniform initialization.
    std::vector<double> alpha((len + 1) * ns, kNegInf);
    alpha[0] = 0.0;
    for (size_t t = 0; t < len; ++t) {
        double* cur = &alpha[t * ns];
        double* nxt = &alpha[(t + 1) * ns];
        for (int s = 0; s < ns; ++s) {
            if (cur[s] == kNegInf) continue;
            for (int u = 0; u <= 1; ++u) {
                int s2 = code.next_state(s, u);
                nxt[s2] = max_star(nxt[s2], cur[s] + gamma(t, s, u));
            }
        }
        double mx = *std::max_element(nxt, nxt + ns);
        for (int s = 0; s < ns; ++s) nxt[s] -= mx;
    }

    std::vector<double> beta((len + 1) * ns, 0.0);
    for (size_t ti = len; ti-- > 0;) {
        double* cur = &beta[ti * ns];
        const double* nxt = &beta[(ti + 1) * ns];
        for (int s = 0; s < ns; ++s) {
            double acc = kNegInf;
            for (int u = 0; u <= 1; ++u)
                acc = max_star(acc, gamma(ti, s, u) + nxt[code.next_state(s, u)]);
            cur[s] = acc;
        }
        double mx = *std::max_element(cur, cur + ns);
        for (int s = 0; s < ns; ++s) cur[s] -= mx;
    }

    SisoOutput out;
    out.extrinsic_systematic.resize(len);
    out.aposteriori.resize(len);
    for (size_t t = 0; t < len; ++t) {
        double num = kNegInf, den = kNegInf;
        const double* a = &alpha[t * ns];
        const double* b = &beta[(t + 1) * ns];
        for (int s = 0; s < ns; ++s) {
            if (a[s] == kNegInf) continue;
            num = max_star(num, a[s] + gamma(t, s, 0) + b[code.next_state(s, 0)]);
            den = max_star(den, a[s] + gamma(t, s, 1) + b[code.next_state(s, 1)]);
        }
        double app = num - den;
        out.aposteriori[t] = app;
        out.extrinsic_systematic[t] = app - systematic_llr[t] - prior_llr[t];
    }
    return out;
}

} // namespace marc
