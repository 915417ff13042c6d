#ifndef MARC_ABP_HPP
#define MARC_ABP_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "marc/bitmat.hpp"
#include "marc/rs.hpp"

namespace marc {

struct AbpConfig {
    int inner_iterations = 20; // standalone default; the joint loop uses fewer
    double damping = 0.1;      // weight of the fresh extrinsic per round
    double llr_clip = 30.0;
};

struct AbpResult {
    std::vector<double> extrinsic;  // accumulated extrinsic, one per code bit
    std::vector<std::uint8_t> hard; // hard decisions on the final total LLR
    bool parity_satisfied = false;  // those decisions form a codeword by themselves
    std::optional<std::vector<Symbol>> decoded; // message, from parity satisfaction or BM
};

// Gaussian elimination that turns the columns at the `order` permutation's
// least-reliable end into unit vectors.  `order` lists bit positions from
// least to most reliable; dependent candidates are skipped.  Returns the
// adapted matrix; if `pivots` is non-null it receives the chosen columns.
BitMatrix adapt_parity_matrix(const BitMatrix& h, const std::vector<int>& order,
                              std::vector<int>* pivots = nullptr);

// One sum-product pass over the (adapted) parity-check matrix: extrinsic LLR
// for each bit given total input LLRs q, scaled by `damping`.
std::vector<double> spa_extrinsic(const BitMatrix& h, const std::vector<double>& q,
                                  double damping = 1.0);

// Adaptive belief propagation over the binary image of a Reed-Solomon code
// (the Jiang-Narayanan scheme).  Each round sorts |total LLR|, re-pivots the
// parity matrix onto the least reliable independent columns, runs one SPA
// pass, and folds the damped result into an accumulated extrinsic.  A round
// whose hard decisions satisfy the parity check ends the loop; otherwise the
// final hard decisions get one algebraic (Berlekamp-Massey) attempt.
class AbpDecoder {
  public:
    AbpDecoder(const RsCode& code, AbpConfig config = {});

    // channel: intrinsic LLRs for the N*m code bits.  prior: optional extra
    // a-priori term of the same length (empty = none).
    AbpResult decode(const std::vector<double>& channel,
                     const std::vector<double>& prior = {}) const;

    const AbpConfig& config() const { return config_; }
    const BitMatrix& parity_matrix() const { return h_; }

  private:
    const RsCode* code_;
    AbpConfig config_;
    BitMatrix h_;
};

} // namespace marc

#endif
