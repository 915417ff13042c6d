#ifndef MARC_CONV_HPP
#define MARC_CONV_HPP

#include <cstdint>
#include <vector>

#include "marc/errors.hpp"

namespace marc {

// Recursive systematic convolutional code defined by an octal
// (feedback, feedforward) pair, e.g. (7, 5) for 1 + D + D^2 over
// (1 + D^2). Bit k of a parsed octal value is the coefficient of D^k.
// The encoder starts in the all-zero state and is left unterminated.
class ConvCode {
  public:
    ConvCode(unsigned feedback_octal, unsigned feedforward_octal);

    int memory() const { return memory_; }
    int constraint_length() const { return memory_ + 1; }
    int num_states() const { return 1 << memory_; }
    unsigned feedback_octal() const { return fb_octal_; }
    unsigned feedforward_octal() const { return ff_octal_; }

    int next_state(int state, int input) const { return next_[2 * state + input]; }
    int parity_bit(int state, int input) const { return out_[2 * state + input]; }

    // Parity stream for the systematic input bits (systematic bits are
    // not rematerialized; the caller already has them).
    std::vector<std::uint8_t> encode_parity(const std::vector<std::uint8_t>& bits) const;

  private:
    unsigned fb_octal_, ff_octal_;
    unsigned fb_bits_, ff_bits_;
    int memory_;
    std::vector<int> next_; // [2*state + input]
    std::vector<int> out_;  // parity bit per transition
};

// Periodic parity puncturing mask; positions with mask = 1 survive.
struct PuncturePattern {
    std::vector<std::uint8_t> mask;

    explicit PuncturePattern(std::vector<std::uint8_t> mask_bits);
    int period() const { return static_cast<int>(mask.size()); }
    bool keeps(int i) const { return mask[i % mask.size()] != 0; }
    int survivors(int length) const; // kept positions among the first `length`
};

template <typename T>
std::vector<T> puncture(const std::vector<T>& seq, const PuncturePattern& p) {
    std::vector<T> out;
    out.reserve(seq.size());
    for (size_t i = 0; i < seq.size(); ++i)
        if (p.keeps(static_cast<int>(i))) out.push_back(seq[i]);
    return out;
}

// Inverse of puncture on LLRs: punctured positions become erasures (LLR 0).
std::vector<double> depuncture(const std::vector<double>& llr, const PuncturePattern& p,
                               int full_length);

struct SisoOutput {
    std::vector<double> extrinsic_systematic; // excludes own channel + prior
    std::vector<double> aposteriori;          // channel + prior + extrinsic
};

// Log-domain BCJR over the unterminated trellis (exact max*, per-stage
// normalization). parity_llr must already be depunctured to the input
// length; erased positions carry LLR 0.
SisoOutput bcjr_decode(const ConvCode& code, const std::vector<double>& systematic_llr,
                       const std::vector<double>& parity_llr,
                       const std::vector<double>& prior_llr);

} // namespace marc

#endif
