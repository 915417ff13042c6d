#ifndef MARC_ANALYSIS_HPP
#define MARC_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "marc/marc.hpp"
#include "marc/rng.hpp"

namespace marc {

// Consistent Gaussian a-priori model a = (sigma^2/2) x + N(0, sigma^2);
// sigma beyond this cap is treated as mutual information 1.
inline constexpr double kSigmaCap = 10.0;

// Mutual information between x in {+-1} and the model above, by quadrature.
double j_function(double sigma);
// Inverse of j_function by bisection on [0, kSigmaCap]; values at or above
// j_function(kSigmaCap) return the cap.
double j_inverse(double i);

// A-priori LLRs carrying mutual information i_a about the given bits
// (bit 0 -> x = +1).
std::vector<double> gen_apriori_sigma(const std::vector<std::uint8_t>& bits, double sigma,
                                      Rng& rng);
std::vector<double> gen_apriori(const std::vector<std::uint8_t>& bits, double i_a, Rng& rng);

// Averaging estimator I = 1 - E[log2(1 + exp(-x*L))], clamped to [0,1].
double mutual_information(const std::vector<std::uint8_t>& bits,
                          const std::vector<double>& llrs);
// Binned estimate of the defining conditional-pdf integral, for cross-checks.
double mutual_information_histogram(const std::vector<std::uint8_t>& bits,
                                    const std::vector<double>& llrs, int bins = 100);

struct ExitPoint {
    double i_a;
    double i_e;
};

struct ExitCurve {
    std::string decoder; // "inner" or "outer"
    double eb_n0_db = 0.0;
    std::vector<ExitPoint> points;
    long long trials = 0; // per grid point
};

struct ExitConfig {
    std::vector<double> i_a_grid; // empty = 0 to 1 in steps of 0.05
    int trials = 500;             // fading realizations (inner) / codewords (outer) per point
    std::uint64_t seed = 1;
    // Measure the bare trellis extrinsic (the classic transfer-chart
    // convention).  true adds the systematic channel LLR, i.e. the full
    // input the packet decoders consume in the joint loop.
    bool include_channel_term = false;
};

std::vector<double> default_ia_grid();

// Transfer curve of the column-wise trellis SISO over the cooperative
// channel at one Eb/N0 (averaged over fading and noise).
ExitCurve exit_inner(const MarcSystem& sys, double eb_n0_db, const ExitConfig& cfg);

// Transfer curve of the adaptive-BP packet decoder; SNR-independent, the
// a-priori LLRs enter as its channel input.
ExitCurve exit_outer(const MarcSystem& sys, const ExitConfig& cfg);

// Convergence-tunnel test: the composed map x -> outer(inner(x)) must exceed
// x at every inner grid point with i_a <= 1 - eps.
bool tunnel_open(const ExitCurve& inner, const ExitCurve& outer, double eps = 0.02);

// Block fading gives every frame its own inner curve: a deep fade closes
// the tunnel locally no matter how good the average channel is, so the
// averaged chart understates convergence in exactly the regime where the
// waterfall lives.  This measures the fraction of channel realizations
// whose single-frame inner curve clears the outer curve everywhere.
double tunnel_open_fraction(const MarcSystem& sys, double eb_n0_db, const ExitConfig& cfg,
                            const ExitCurve& outer, double eps = 0.02);

struct BerPoint {
    double eb_n0_db = 0.0;
    int iteration = 1; // 1-based joint iteration this row reports
    long long bit_errors = 0;
    long long total_bits = 0;
    double ber = 0.0;
    double fer = 0.0;
    long long frame_errors = 0;
    long long trials = 0;
    double ci_low = 0.0; // 95% interval on ber from per-frame error variance
    double ci_high = 0.0;
};

struct BerConfig {
    std::vector<double> eb_n0_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    long long min_frame_errors = 100; // stop a grid point once reached (final iteration)
    long long min_trials = 100;
    long long max_trials = 20000;
    int batch = 32; // stopping rule evaluated at batch boundaries only
    int threads = 1;
    std::uint64_t seed = 1;
    bool xor_baseline = false;     // XOR relay + non-iterative receiver instead
    bool keep_frame_detail = false; // retain per-frame error counts per iteration
};

struct BerPointDetail {
    double eb_n0_db = 0.0;
    // frame_errors[iteration][trial]: message-bit errors of that frame
    std::vector<std::vector<int>> frame_errors;
};

struct BerSweepResult {
    std::vector<BerPoint> points;       // grid-major, iteration-minor
    std::vector<BerPointDetail> detail; // one per grid point when kept
};

// Monte Carlo sweep with deterministic per-trial seeds: results are
// byte-identical for a given (config, seed) regardless of thread count.
BerSweepResult ber_sweep(const MarcSystem& sys, const BerConfig& cfg);

} // namespace marc

#endif
