#include "marc/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "marc/errors.hpp"
#include "marc/llr.hpp"
#include "marc/parallel.hpp"

namespace marc {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kSqrt2Pi = 2.5066282746310002;

// log2(1 + e^u), overflow-safe for any u.
double log2_1p_exp(double u) {
    double sp = u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
    return sp / kLn2;
}

} // namespace

double j_function(double sigma) {
    if (sigma <= 0.0) return 0.0;
    const double mu = 0.5 * sigma * sigma;
    const int n = 2000; // Simpson intervals
    const double lo = mu - 12.0 * sigma;
    const double h = 24.0 * sigma / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double l = lo + i * h;
        double w = (i == 0 || i == n) ? 1.0 : ((i & 1) ? 4.0 : 2.0);
        double z = (l - mu) / sigma;
        double pdf = std::exp(-0.5 * z * z) / (sigma * kSqrt2Pi);
        s += w * pdf * log2_1p_exp(-l);
    }
    return std::clamp(1.0 - s * h / 3.0, 0.0, 1.0);
}

double j_inverse(double i) {
    if (i <= 0.0) return 0.0;
    if (i >= j_function(kSigmaCap)) return kSigmaCap;
    double lo = 0.0, hi = kSigmaCap;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (j_function(mid) < i ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> gen_apriori_sigma(const std::vector<std::uint8_t>& bits, double sigma,
                                      Rng& rng) {
    const double mu = 0.5 * sigma * sigma;
    std::vector<double> a(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        double x = bits[i] ? -1.0 : 1.0;
        a[i] = mu * x + sigma * rng.gaussian();
    }
    return a;
}

std::vector<double> gen_apriori(const std::vector<std::uint8_t>& bits, double i_a, Rng& rng) {
    return gen_apriori_sigma(bits, j_inverse(i_a), rng);
}

double mutual_information(const std::vector<std::uint8_t>& bits,
                          const std::vector<double>& llrs) {
    if (bits.size() != llrs.size() || bits.empty())
        throw LengthMismatch("mutual_information: bits/LLR lengths");
    double acc = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        double x = bits[i] ? -1.0 : 1.0;
        acc += log2_1p_exp(-x * llrs[i]);
    }
    return std::clamp(1.0 - acc / static_cast<double>(bits.size()), 0.0, 1.0);
}

double mutual_information_histogram(const std::vector<std::uint8_t>& bits,
                                    const std::vector<double>& llrs, int bins) {
    if (bits.size() != llrs.size() || bits.empty())
        throw LengthMismatch("mutual_information_histogram: bits/LLR lengths");
    if (bins < 2) throw ConfigError("mutual_information_histogram: bins must be >= 2");
    double amax = 0.0;
    for (double l : llrs) amax = std::max(amax, std::fabs(l));
    if (amax == 0.0) return 0.0;
    amax *= 1.0 + 1e-9;
    std::vector<long long> cnt[2];
    cnt[0].assign(bins, 0);
    cnt[1].assign(bins, 0);
    long long n[2] = {0, 0};
    for (std::size_t i = 0; i < bits.size(); ++i) {
        int b = static_cast<int>((llrs[i] + amax) / (2.0 * amax) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++cnt[bits[i] ? 1 : 0][b];
        ++n[bits[i] ? 1 : 0];
    }
    if (n[0] == 0 || n[1] == 0)
        throw ConfigError("mutual_information_histogram: needs both bit values present");
    double info = 0.0;
    for (int b = 0; b < bins; ++b) {
        double p0 = static_cast<double>(cnt[0][b]) / n[0];
        double p1 = static_cast<double>(cnt[1][b]) / n[1];
        double avg = 0.5 * (p0 + p1);
        if (p0 > 0.0) info += 0.5 * p0 * std::log2(p0 / avg);
        if (p1 > 0.0) info += 0.5 * p1 * std::log2(p1 / avg);
    }
    return std::clamp(info, 0.0, 1.0);
}

std::vector<double> default_ia_grid() {
    std::vector<double> g(21);
    for (int i = 0; i <= 20; ++i) g[i] = 0.05 * i;
    return g;
}

namespace {

// One column-wise trellis pass over a frame with the given per-row priors;
// returns the accumulated log2(1 + e^{-x*llr}) over all data bits.
double inner_frame_acc(const MarcSystem& sys, const ChannelRound& round,
                       const std::vector<std::vector<double>>& prior, bool include_channel,
                       long long& samples) {
    const int d = sys.data_rows();
    const int c = sys.cols();
    const int pr = sys.parity_rows();
    std::vector<double> sysl(d), prl(d), kept(pr);
    double acc = 0.0;
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < d; ++i) {
            sysl[i] = round.llr.at(i, j);
            prl[i] = prior[i][j];
        }
        for (int r = 0; r < pr; ++r) kept[r] = round.llr.at(d + r, j);
        auto par = depuncture(kept, sys.puncture(), d);
        SisoOutput out = bcjr_decode(sys.conv(), sysl, par, prl);
        for (int i = 0; i < d; ++i) {
            double llr = out.extrinsic_systematic[i];
            if (include_channel) llr += sysl[i];
            double x = round.truth.matrix_rows[i][j] ? -1.0 : 1.0;
            acc += log2_1p_exp(-x * llr);
            ++samples;
        }
    }
    return acc;
}

} // namespace

ExitCurve exit_inner(const MarcSystem& sys, double eb_n0_db, const ExitConfig& cfg) {
    ExitCurve curve;
    curve.decoder = "inner";
    curve.eb_n0_db = eb_n0_db;
    curve.trials = cfg.trials;
    const auto grid = cfg.i_a_grid.empty() ? default_ia_grid() : cfg.i_a_grid;
    const int d = sys.data_rows();
    for (double ia : grid) {
        const double sigma = j_inverse(ia);
        double acc = 0.0;
        long long samples = 0;
        for (int f = 0; f < cfg.trials; ++f) {
            // The trial seed ignores the grid index: every grid point replays
            // the same channel and prior-noise draws, only the prior scale
            // differs, so sampling noise cancels out of the curve shape.
            Rng rng(derive_seed(cfg.seed, 0xE1, 0, static_cast<std::uint64_t>(f)));
            ChannelRound round = simulate_round(sys, eb_n0_db, rng);
            std::vector<std::vector<double>> prior(d);
            for (int r = 0; r < d; ++r)
                prior[r] = gen_apriori_sigma(round.truth.matrix_rows[r], sigma, rng);
            acc += inner_frame_acc(sys, round, prior, cfg.include_channel_term, samples);
        }
        curve.points.push_back(
            {ia, std::clamp(1.0 - acc / static_cast<double>(samples), 0.0, 1.0)});
    }
    return curve;
}

ExitCurve exit_outer(const MarcSystem& sys, const ExitConfig& cfg) {
    ExitCurve curve;
    curve.decoder = "outer";
    curve.trials = cfg.trials;
    const auto grid = cfg.i_a_grid.empty() ? default_ia_grid() : cfg.i_a_grid;
    const int m = sys.config().m;
    const int n_bits = sys.rs().codeword_bits();
    const double clip = sys.config().abp.llr_clip;
    AbpDecoder abp(sys.rs(), sys.config().abp);
    for (double ia : grid) {
        const double sigma = j_inverse(ia);
        double acc = 0.0;
        long long samples = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            // Same common-random-numbers coupling as exit_inner.
            Rng rng(derive_seed(cfg.seed, 0xE2, 0, static_cast<std::uint64_t>(t)));
            std::vector<Symbol> msg(sys.rs().k());
            for (auto& s : msg)
                s = static_cast<Symbol>(
                    rng.uniform_int(static_cast<std::uint32_t>(sys.rs().field().size())));
            auto bits = symbols_to_bits(m, sys.rs().encode(msg));
            auto apriori = gen_apriori_sigma(bits, sigma, rng);
            AbpResult ar = abp.decode(apriori);
            // A decoded word acts as certainty in the joint loop (its
            // extrinsic is pinned), so measure it that way here too.
            std::vector<double> out;
            if (ar.decoded) {
                auto cw = symbols_to_bits(m, sys.rs().encode(*ar.decoded));
                out.resize(n_bits);
                for (int i = 0; i < n_bits; ++i) out[i] = cw[i] ? -clip : clip;
            } else {
                out = std::move(ar.extrinsic);
            }
            for (int i = 0; i < n_bits; ++i) {
                double x = bits[i] ? -1.0 : 1.0;
                acc += log2_1p_exp(-x * out[i]);
                ++samples;
            }
        }
        curve.points.push_back(
            {ia, std::clamp(1.0 - acc / static_cast<double>(samples), 0.0, 1.0)});
    }
    return curve;
}

namespace {

double interp_curve(const ExitCurve& c, double x) {
    const auto& p = c.points;
    if (p.empty()) throw ConfigError("tunnel_open: empty curve");
    if (x <= p.front().i_a) return p.front().i_e;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (x <= p[i].i_a) {
            double dx = p[i].i_a - p[i - 1].i_a;
            if (dx <= 0.0) return p[i].i_e;
            double t = (x - p[i - 1].i_a) / dx;
            return p[i - 1].i_e + t * (p[i].i_e - p[i - 1].i_e);
        }
    }
    return p.back().i_e;
}

} // namespace

bool tunnel_open(const ExitCurve& inner, const ExitCurve& outer, double eps) {
    for (const auto& pt : inner.points) {
        if (pt.i_a > 1.0 - eps) continue;
        if (interp_curve(outer, pt.i_e) <= pt.i_a) return false;
    }
    return true;
}

double tunnel_open_fraction(const MarcSystem& sys, double eb_n0_db, const ExitConfig& cfg,
                            const ExitCurve& outer, double eps) {
    if (cfg.trials < 1) throw ConfigError("tunnel_open_fraction: trials must be >= 1");
    const auto grid = cfg.i_a_grid.empty() ? default_ia_grid() : cfg.i_a_grid;
    const int d = sys.data_rows();
    const int c = sys.cols();
    int open = 0;
    for (int f = 0; f < cfg.trials; ++f) {
        Rng rng(derive_seed(cfg.seed, 0xE3, 0, static_cast<std::uint64_t>(f)));
        ChannelRound round = simulate_round(sys, eb_n0_db, rng);
        // One prior-noise draw per bit, rescaled for each grid point, keeps
        // the single-frame curve coherent along the I_a axis.
        std::vector<std::vector<double>> z(d, std::vector<double>(c));
        for (auto& row : z)
            for (auto& v : row) v = rng.gaussian();
        ExitCurve inner;
        inner.decoder = "inner";
        inner.eb_n0_db = eb_n0_db;
        inner.trials = 1;
        std::vector<std::vector<double>> prior(d, std::vector<double>(c));
        for (double ia : grid) {
            const double sigma = j_inverse(ia);
            const double mu = 0.5 * sigma * sigma;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < c; ++j) {
                    double x = round.truth.matrix_rows[i][j] ? -1.0 : 1.0;
                    prior[i][j] = mu * x + sigma * z[i][j];
                }
            long long samples = 0;
            double acc = inner_frame_acc(sys, round, prior, cfg.include_channel_term, samples);
            inner.points.push_back(
                {ia, std::clamp(1.0 - acc / static_cast<double>(samples), 0.0, 1.0)});
        }
        if (tunnel_open(inner, outer, eps)) ++open;
    }
    return static_cast<double>(open) / static_cast<double>(cfg.trials);
}

BerSweepResult ber_sweep(const MarcSystem& sys, const BerConfig& cfg) {
    if (cfg.eb_n0_grid.empty()) throw ConfigError("ber_sweep: empty Eb/N0 grid");
    if (cfg.min_trials < 1 || cfg.max_trials < cfg.min_trials)
        throw ConfigError("ber_sweep: need 1 <= min_trials <= max_trials");
    if (cfg.batch < 1) throw ConfigError("ber_sweep: batch must be >= 1");
    if (cfg.min_frame_errors < 1) throw ConfigError("ber_sweep: min_frame_errors must be >= 1");

    const int iters = cfg.xor_baseline ? 1 : sys.config().joint_iterations;
    const long long frame_bits =
        static_cast<long long>(sys.codewords()) * sys.rs().message_bits();
    const int threads = resolve_threads(cfg.threads);
    const std::uint64_t family = cfg.xor_baseline ? 0xBE1 : 0xBE0;

    BerSweepResult result;
    for (std::size_t gi = 0; gi < cfg.eb_n0_grid.size(); ++gi) {
        const double db = cfg.eb_n0_grid[gi];
        std::vector<long long> sum_e(iters, 0), sum_e2(iters, 0), ferr(iters, 0);
        long long trials = 0;
        BerPointDetail detail;
        detail.eb_n0_db = db;
        if (cfg.keep_frame_detail) detail.frame_errors.assign(iters, {});

        while (trials < cfg.max_trials) {
            const int b = static_cast<int>(std::min<long long>(cfg.batch,
                                                               cfg.max_trials - trials));
            std::vector<std::vector<int>> slot(b);
            parallel_for(b, threads, [&](int i) {
                Rng rng(derive_seed(cfg.seed, family, gi,
                                    static_cast<std::uint64_t>(trials + i)));
                if (cfg.xor_baseline) {
                    auto round = simulate_xor_round(sys, db, rng);
                    auto res = xor_decode(sys, round.llr);
                    slot[i] = {message_bit_errors(res.messages, round.truth.messages)};
                } else {
                    auto round = simulate_round(sys, db, rng);
                    auto res = joint_decode(sys, round.llr, &round.truth.messages);
                    std::vector<int> e(iters);
                    for (int k = 0; k < iters; ++k)
                        e[k] = res.per_iteration[k].message_bit_errors;
                    slot[i] = std::move(e);
                }
            });
            for (int i = 0; i < b; ++i) {
                for (int k = 0; k < iters; ++k) {
                    const long long e = slot[i][k];
                    sum_e[k] += e;
                    sum_e2[k] += e * e;
                    if (e > 0) ++ferr[k];
                    if (cfg.keep_frame_detail) detail.frame_errors[k].push_back(slot[i][k]);
                }
            }
            trials += b;
            if (trials >= cfg.min_trials && ferr[iters - 1] >= cfg.min_frame_errors) break;
        }

        for (int k = 0; k < iters; ++k) {
            BerPoint pt;
            pt.eb_n0_db = db;
            pt.iteration = k + 1;
            pt.bit_errors = sum_e[k];
            pt.total_bits = trials * frame_bits;
            pt.trials = trials;
            pt.frame_errors = ferr[k];
            pt.ber = static_cast<double>(sum_e[k]) / static_cast<double>(pt.total_bits);
            pt.fer = static_cast<double>(ferr[k]) / static_cast<double>(trials);
            double varf = 0.0;
            if (trials > 1) {
                double mean = static_cast<double>(sum_e[k]) / static_cast<double>(trials);
                varf = (static_cast<double>(sum_e2[k]) - trials * mean * mean) /
                       static_cast<double>(trials - 1);
                varf = std::max(varf, 0.0);
            }
            double half = 1.959963984540054 * std::sqrt(varf / static_cast<double>(trials)) /
                          static_cast<double>(frame_bits);
            pt.ci_low = std::max(0.0, pt.ber - half);
            pt.ci_high = std::min(1.0, pt.ber + half);
            result.points.push_back(pt);
        }
        if (cfg.keep_frame_detail) result.detail.push_back(std::move(detail));
    }
    return result;
}

} // namespace marc
