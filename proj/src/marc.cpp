#include "marc/marc.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <utility>

#include "marc/errors.hpp"
#include "marc/llr.hpp"

namespace marc {

namespace {
constexpr char kMagic[4] = {'M', 'R', 'C', 'D'};
constexpr std::uint32_t kDumpVersion = 1;
} // namespace

void save_llr_matrix(const LlrMatrix& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path);
    std::uint32_t hdr[3] = {kDumpVersion, static_cast<std::uint32_t>(m.rows),
                            static_cast<std::uint32_t>(m.cols)};
    f.write(kMagic, 4);
    f.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    for (RowLabel l : m.labels) {
        char b = static_cast<char>(l);
        f.write(&b, 1);
    }
    f.write(reinterpret_cast<const char*>(m.v.data()),
            static_cast<std::streamsize>(m.v.size() * sizeof(double)));
    if (!f) throw Error("write failed: " + path);
}

LlrMatrix load_llr_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open: " + path);
    char magic[4];
    std::uint32_t hdr[3];
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (!f || std::memcmp(magic, kMagic, 4) != 0) throw Error("not an LLR matrix dump: " + path);
    if (hdr[0] != kDumpVersion) throw Error("unsupported dump version in " + path);
    LlrMatrix m(static_cast<int>(hdr[1]), static_cast<int>(hdr[2]));
    for (int r = 0; r < m.rows; ++r) {
        char b = 0;
        f.read(&b, 1);
        if (b < 0 || b > 2) throw Error("bad row label in " + path);
        m.labels[r] = static_cast<RowLabel>(b);
    }
    f.read(reinterpret_cast<char*>(m.v.data()),
           static_cast<std::streamsize>(m.v.size() * sizeof(double)));
    if (!f) throw Error("truncated dump: " + path);
    return m;
}

std::vector<int> build_interleaver(int n, std::uint64_t seed) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(i + 1)));
        std::swap(p[i], p[j]);
    }
    return p;
}

std::vector<int> invert_permutation(const std::vector<int>& perm) {
    std::vector<int> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
    return inv;
}

MarcSystem::MarcSystem(MarcConfig config)
    : cfg_(std::move(config)), rs_(Field(cfg_.m, cfg_.primitive_poly), cfg_.k),
      conv_(cfg_.conv_feedback, cfg_.conv_feedforward),
      punct_(std::vector<std::uint8_t>(cfg_.puncture_mask.begin(), cfg_.puncture_mask.end())) {
    if (cfg_.packets_per_user < 1) throw ConfigError("packets_per_user must be >= 1");
    if (cfg_.joint_iterations < 1) throw ConfigError("joint_iterations must be >= 1");
    if (parity_rows() < 1) throw ConfigError("puncture mask removes every parity row");
    const std::uint64_t seeds[2] = {cfg_.interleaver_seed1, cfg_.interleaver_seed2};
    for (int s = 0; s < 2; ++s) {
        ilv_[s] = build_interleaver(frame_bits(), seeds[s]);
        dilv_[s] = invert_permutation(ilv_[s]);
    }
}

std::vector<std::vector<Symbol>> MarcSystem::random_messages(Rng& rng) const {
    std::vector<std::vector<Symbol>> msgs(codewords(), std::vector<Symbol>(rs_.k()));
    for (auto& m : msgs)
        for (auto& s : m)
            s = static_cast<Symbol>(rng.uniform_int(static_cast<std::uint32_t>(rs_.field().size())));
    return msgs;
}

std::vector<std::vector<std::uint8_t>> MarcSystem::build_source_frame(
    int source, const std::vector<std::vector<Symbol>>& messages) const {
    const int L = cfg_.packets_per_user;
    if (static_cast<int>(messages.size()) != L)
        throw LengthMismatch("build_source_frame: one message per packet required");
    std::vector<std::uint8_t> frame;
    frame.reserve(frame_bits());
    for (const auto& msg : messages) {
        auto bits = symbols_to_bits(cfg_.m, rs_.encode(msg));
        frame.insert(frame.end(), bits.begin(), bits.end());
    }
    auto interleaved = permute(ilv_[source], frame);
    std::vector<std::vector<std::uint8_t>> rows(L);
    for (int p = 0; p < L; ++p)
        rows[p].assign(interleaved.begin() + static_cast<std::ptrdiff_t>(p) * cols(),
                       interleaved.begin() + static_cast<std::ptrdiff_t>(p + 1) * cols());
    return rows;
}

std::vector<std::vector<std::uint8_t>> MarcSystem::source_rows(
    const std::vector<std::vector<Symbol>>& messages) const {
    if (static_cast<int>(messages.size()) != codewords())
        throw LengthMismatch("source_rows: one message per codeword required");
    const int L = cfg_.packets_per_user;
    std::vector<std::vector<std::uint8_t>> rows(data_rows());
    for (int s = 0; s < 2; ++s) {
        std::vector<std::vector<Symbol>> own(messages.begin() + static_cast<std::ptrdiff_t>(s) * L,
                                             messages.begin() +
                                                 static_cast<std::ptrdiff_t>(s + 1) * L);
        auto packet_rows = build_source_frame(s, own);
        for (int p = 0; p < L; ++p) rows[matrix_row(s, p)] = std::move(packet_rows[p]);
    }
    return rows;
}

std::vector<std::vector<std::uint8_t>> MarcSystem::relay_network_encode(
    const std::vector<std::vector<std::uint8_t>>& data) const {
    if (static_cast<int>(data.size()) != data_rows())
        throw LengthMismatch("relay_network_encode: wrong number of data rows");
    const int c = cols();
    const int pr = parity_rows();
    std::vector<std::vector<std::uint8_t>> out(pr, std::vector<std::uint8_t>(c));
    std::vector<std::uint8_t> col(data_rows());
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < data_rows(); ++i) col[i] = data[i][j];
        auto kept = marc::puncture(conv_.encode_parity(col), punct_);
        for (int r = 0; r < pr; ++r) out[r][j] = kept[r];
    }
    return out;
}

namespace {

// Destination-side reception shared by the convolutional and XOR relays:
// two Alamouti receive instants per packet pair, one plain observation per
// relay parity row, fresh fading per row pair / parity row.  Parity rows
// flagged silent are not transmitted and stay erased (LLR 0).
LlrMatrix receive_frame(const MarcSystem& sys,
                        const std::vector<std::vector<std::uint8_t>>& data,
                        const std::vector<std::vector<std::uint8_t>>& parity, double n0,
                        Rng& rng, const std::vector<char>& silent = {}) {
    const int c = sys.cols();
    const int d = sys.data_rows();
    LlrMatrix llr(d + static_cast<int>(parity.size()), c);
    for (int p = 0; p < d / 2; ++p) {
        llr.labels[2 * p] = RowLabel::User1;
        llr.labels[2 * p + 1] = RowLabel::User2;
        Complex h1 = rng.cgaussian(1.0);
        Complex h2 = rng.cgaussian(1.0);
        for (int j = 0; j < c; ++j) {
            Complex s1 = bpsk_map_bit(data[2 * p][j]);
            Complex s2 = bpsk_map_bit(data[2 * p + 1][j]);
            auto [t1, t2] = alamouti_encode(s1, s2);
            Complex y1 = h1 * s1 + h2 * s2 + rng.cgaussian(n0);
            Complex y2 = h1 * t1 + h2 * t2 + rng.cgaussian(n0);
            auto [l1, l2] = alamouti_soft_decode(y1, y2, h1, h2, n0);
            llr.at(2 * p, j) = l1;
            llr.at(2 * p + 1, j) = l2;
        }
    }
    for (std::size_t r = 0; r < parity.size(); ++r) {
        const int row = d + static_cast<int>(r);
        llr.labels[row] = RowLabel::RelayParity;
        if (!silent.empty() && silent[r]) continue; // nothing on the air; stays at LLR 0
        Complex h3 = rng.cgaussian(1.0);
        for (int j = 0; j < c; ++j) {
            Complex y = h3 * bpsk_map_bit(parity[r][j]) + rng.cgaussian(n0);
            llr.at(row, j) = llr_demod(y, h3, n0);
        }
    }
    return llr;
}

// The relay's reconstruction of the data rows from its own reception of the
// direct transmissions.  Rows whose algebraic decode fails are returned as
// hard decisions and flagged; the caller decides whether to forward at all.
std::vector<std::vector<std::uint8_t>> relay_estimate(const MarcSystem& sys,
                                                      const RoundTruth& truth, double n0_relay,
                                                      Rng& rng, std::vector<char>& row_failed) {
    const int c = sys.cols();
    const int L = sys.packets_per_user();
    const int m = sys.config().m;
    std::vector<std::vector<std::uint8_t>> est(sys.data_rows());
    row_failed.assign(sys.data_rows(), 0);
    for (int s = 0; s < 2; ++s) {
        std::vector<std::uint8_t> hard(sys.frame_bits());
        for (int p = 0; p < L; ++p) {
            Complex g = rng.cgaussian(1.0);
            const auto& sent = truth.matrix_rows[MarcSystem::matrix_row(s, p)];
            for (int j = 0; j < c; ++j) {
                Complex y = g * bpsk_map_bit(sent[j]) + rng.cgaussian(n0_relay);
                hard[static_cast<std::size_t>(p) * c + j] =
                    hard_bit(llr_demod(y, g, n0_relay));
            }
        }
        auto code_order = permute(sys.deinterleaver(s), hard);
        for (int p = 0; p < L; ++p) {
            auto first = code_order.begin() + static_cast<std::ptrdiff_t>(p) * c;
            std::vector<std::uint8_t> word_bits(first, first + c);
            if (auto dec = sys.rs().bm_decode(bits_to_symbols(m, word_bits))) {
                auto clean = symbols_to_bits(m, sys.rs().encode(dec->message));
                std::copy(clean.begin(), clean.end(), first);
            } else {
                row_failed[MarcSystem::matrix_row(s, p)] = 1;
            }
        }
        auto rebuilt = permute(sys.interleaver(s), code_order);
        for (int p = 0; p < L; ++p)
            est[MarcSystem::matrix_row(s, p)].assign(
                rebuilt.begin() + static_cast<std::ptrdiff_t>(p) * c,
                rebuilt.begin() + static_cast<std::ptrdiff_t>(p + 1) * c);
    }
    return est;
}

RoundTruth make_truth(const MarcSystem& sys, Rng& rng) {
    RoundTruth truth;
    truth.messages = sys.random_messages(rng);
    truth.matrix_rows = sys.source_rows(truth.messages);
    truth.code_bits.resize(sys.codewords());
    for (int cw = 0; cw < sys.codewords(); ++cw)
        truth.code_bits[cw] = symbols_to_bits(sys.config().m, sys.rs().encode(truth.messages[cw]));
    return truth;
}

std::vector<std::vector<std::uint8_t>> relay_view_of(const MarcSystem& sys,
                                                     const RoundTruth& truth, double eb_n0_db,
                                                     Rng& rng, std::vector<char>& row_failed) {
    if (sys.config().relay_mode == RelayMode::Ideal) {
        row_failed.assign(sys.data_rows(), 0);
        return truth.matrix_rows;
    }
    double n0_relay = sys.n0_at(eb_n0_db + sys.config().relay_snr_offset_db);
    return relay_estimate(sys, truth, n0_relay, rng, row_failed);
}

} // namespace

ChannelRound simulate_round(const MarcSystem& sys, double eb_n0_db, Rng& rng) {
    ChannelRound round;
    round.truth = make_truth(sys, rng);
    std::vector<char> row_failed;
    auto relay_view = relay_view_of(sys, round.truth, eb_n0_db, rng, row_failed);
    for (char f : row_failed) round.relay_decode_failures += f;
    auto parity = sys.relay_network_encode(relay_view);
    // Selective forwarding: column parity mixes every row, so a single bad
    // packet corrupts the whole parity block.  The relay only transmits
    // frames it decoded completely; the destination sees erasures otherwise.
    std::vector<char> silent(parity.size(),
                             round.relay_decode_failures > 0 ? 1 : 0);
    round.llr =
        receive_frame(sys, round.truth.matrix_rows, parity, sys.n0_at(eb_n0_db), rng, silent);
    return round;
}

ChannelRound simulate_xor_round(const MarcSystem& sys, double eb_n0_db, Rng& rng) {
    ChannelRound round;
    round.truth = make_truth(sys, rng);
    std::vector<char> row_failed;
    auto relay_view = relay_view_of(sys, round.truth, eb_n0_db, rng, row_failed);
    for (char f : row_failed) round.relay_decode_failures += f;
    const int pairs = sys.packets_per_user();
    std::vector<std::vector<std::uint8_t>> parity(pairs,
                                                  std::vector<std::uint8_t>(sys.cols()));
    // Each XOR row only mixes its own pair, so forwarding is selective per
    // pair rather than per frame.
    std::vector<char> silent(pairs, 0);
    for (int p = 0; p < pairs; ++p) {
        silent[p] = row_failed[2 * p] || row_failed[2 * p + 1];
        for (int j = 0; j < sys.cols(); ++j)
            parity[p][j] = relay_view[2 * p][j] ^ relay_view[2 * p + 1][j];
    }
    round.llr =
        receive_frame(sys, round.truth.matrix_rows, parity, sys.n0_at(eb_n0_db), rng, silent);
    return round;
}

namespace {

std::vector<Symbol> message_from_bits(const RsCode& rs, int m,
                                      const std::vector<std::uint8_t>& code_bits) {
    auto syms = bits_to_symbols(m, code_bits);
    return {syms.begin(), syms.begin() + rs.k()};
}

int symbol_bit_diff(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
    int diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        diff += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
    return diff;
}

} // namespace

JointResult joint_decode(const MarcSystem& sys, const LlrMatrix& llr,
                         const std::vector<std::vector<Symbol>>* truth) {
    const MarcConfig& cfg = sys.config();
    const int d = sys.data_rows();
    const int L = sys.packets_per_user();
    const int c = sys.cols();
    const int km = sys.rs().message_bits();
    if (llr.rows != sys.total_rows() || llr.cols != c)
        throw LengthMismatch("joint_decode: LLR matrix shape does not match the frame");

    AbpDecoder abp(sys.rs(), cfg.abp);
    const double clip = cfg.abp.llr_clip;

    // Channel LLRs per codeword in code order.
    std::vector<std::vector<double>> ch_code(d);
    for (int s = 0; s < 2; ++s) {
        std::vector<double> flat(sys.frame_bits());
        for (int p = 0; p < L; ++p)
            for (int j = 0; j < c; ++j)
                flat[static_cast<std::size_t>(p) * c + j] =
                    llr.at(MarcSystem::matrix_row(s, p), j);
        auto code_order = permute(sys.deinterleaver(s), flat);
        for (int p = 0; p < L; ++p)
            ch_code[s * L + p].assign(code_order.begin() + static_cast<std::ptrdiff_t>(p) * c,
                                      code_order.begin() + static_cast<std::ptrdiff_t>(p + 1) * c);
    }

    // Depunctured relay parity LLRs per column.
    std::vector<std::vector<double>> par_cols(c);
    {
        std::vector<double> kept(sys.parity_rows());
        for (int j = 0; j < c; ++j) {
            for (int r = 0; r < sys.parity_rows(); ++r) kept[r] = llr.at(d + r, j);
            par_cols[j] = depuncture(kept, sys.puncture(), d);
        }
    }

    std::vector<std::vector<double>> trellis_prior(d, std::vector<double>(c, 0.0));
    std::vector<std::vector<double>> abp_prior_code(d, std::vector<double>(c, 0.0));
    std::vector<std::vector<double>> abp_ext_code(d, std::vector<double>(c, 0.0));
    std::vector<std::vector<double>> pinned_code(d); // +-clip at decoded bits
    std::vector<char> decoded(d, 0);
    std::vector<std::vector<Symbol>> messages(d);

    auto fallback_message = [&](int cw) {
        std::vector<std::uint8_t> hard(c);
        for (int i = 0; i < c; ++i) {
            double total = ch_code[cw][i] + abp_prior_code[cw][i] + abp_ext_code[cw][i];
            hard[i] = hard_bit(total);
        }
        return message_from_bits(sys.rs(), cfg.m, hard);
    };

    JointResult res;
    res.per_iteration.reserve(cfg.joint_iterations);
    std::vector<double> sys_llr(d), prior_llr(d);

    for (int it = 0; it < cfg.joint_iterations; ++it) {
        res.iterations_run = it + 1;

        // Network-code pass: one trellis per column.
        std::vector<std::vector<double>> net_ext(d, std::vector<double>(c));
        for (int j = 0; j < c; ++j) {
            for (int i = 0; i < d; ++i) {
                sys_llr[i] = llr.at(i, j);
                prior_llr[i] = trellis_prior[i][j];
            }
            SisoOutput out = bcjr_decode(sys.conv(), sys_llr, par_cols[j], prior_llr);
            for (int i = 0; i < d; ++i) net_ext[i][j] = out.extrinsic_systematic[i];
        }

        // Packet pass: deinterleave each source's extrinsic frame, run ABP
        // per codeword, re-interleave the results as the next a priori.
        for (int s = 0; s < 2; ++s) {
            std::vector<double> flat(sys.frame_bits());
            for (int p = 0; p < L; ++p)
                for (int j = 0; j < c; ++j)
                    flat[static_cast<std::size_t>(p) * c + j] =
                        net_ext[MarcSystem::matrix_row(s, p)][j];
            auto prior_frame = permute(sys.deinterleaver(s), flat);

            std::vector<double> ext_frame(sys.frame_bits());
            for (int p = 0; p < L; ++p) {
                const int cw = s * L + p;
                auto first = prior_frame.begin() + static_cast<std::ptrdiff_t>(p) * c;
                if (!(decoded[cw] && cfg.pin_decoded_rows)) {
                    abp_prior_code[cw].assign(first, first + c);
                    AbpResult ar = abp.decode(ch_code[cw], abp_prior_code[cw]);
                    abp_ext_code[cw] = std::move(ar.extrinsic);
                    if (ar.decoded && !decoded[cw]) {
                        auto bits = symbols_to_bits(cfg.m, sys.rs().encode(*ar.decoded));
                        // A codeword reached by belief propagation alone has the
                        // whole soft input behind it; an algebraic fallback from
                        // unreliable hard decisions can be a miscorrection, and
                        // pinning one poisons the other packets through the
                        // column code.  Accept the fallback only if the channel
                        // evidence it contradicts stays under the budget.
                        bool plausible = true;
                        if (!ar.parity_satisfied && cfg.pin_guard_llr > 0.0) {
                            double contradicted = 0.0;
                            for (int i = 0; i < c; ++i)
                                if (hard_bit(ch_code[cw][i]) != bits[i])
                                    contradicted += std::fabs(ch_code[cw][i]);
                            plausible = contradicted <= cfg.pin_guard_llr;
                        }
                        if (plausible) {
                            decoded[cw] = 1;
                            messages[cw] = std::move(*ar.decoded);
                            pinned_code[cw].resize(c);
                            for (int i = 0; i < c; ++i)
                                pinned_code[cw][i] = bits[i] ? -clip : clip;
                        }
                    }
                }
                const std::vector<double>& out_slice =
                    (decoded[cw] && cfg.pin_decoded_rows) ? pinned_code[cw] : abp_ext_code[cw];
                std::copy(out_slice.begin(), out_slice.end(),
                          ext_frame.begin() + static_cast<std::ptrdiff_t>(p) * c);
            }
            auto matrix_order = permute(sys.interleaver(s), ext_frame);
            for (int p = 0; p < L; ++p)
                trellis_prior[MarcSystem::matrix_row(s, p)].assign(
                    matrix_order.begin() + static_cast<std::ptrdiff_t>(p) * c,
                    matrix_order.begin() + static_cast<std::ptrdiff_t>(p + 1) * c);
        }

        IterationStat st;
        st.codewords_decoded =
            static_cast<int>(std::count(decoded.begin(), decoded.end(), 1));
        st.converged = st.codewords_decoded == d;
        if (truth) {
            st.message_bits = d * km;
            for (int cw = 0; cw < d; ++cw) {
                auto est = decoded[cw] ? messages[cw] : fallback_message(cw);
                st.message_bit_errors += symbol_bit_diff(est, (*truth)[cw]);
            }
        }
        res.per_iteration.push_back(st);
        if (st.converged) break;
    }
    while (static_cast<int>(res.per_iteration.size()) < cfg.joint_iterations)
        res.per_iteration.push_back(res.per_iteration.back());

    for (int cw = 0; cw < d; ++cw)
        if (!decoded[cw]) messages[cw] = fallback_message(cw);
    res.messages = std::move(messages);
    res.codeword_decoded = std::move(decoded);
    return res;
}

int message_bit_errors(const std::vector<std::vector<Symbol>>& a,
                       const std::vector<std::vector<Symbol>>& b) {
    if (a.size() != b.size()) throw LengthMismatch("message_bit_errors: list sizes differ");
    int diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size())
            throw LengthMismatch("message_bit_errors: message lengths differ");
        diff += symbol_bit_diff(a[i], b[i]);
    }
    return diff;
}

JointResult xor_decode(const MarcSystem& sys, const LlrMatrix& llr) {
    const int d = sys.data_rows();
    const int L = sys.packets_per_user();
    const int c = sys.cols();
    if (llr.rows != d + L || llr.cols != c)
        throw LengthMismatch("xor_decode: LLR matrix shape does not match the XOR frame");

    JointResult res;
    res.messages.resize(d);
    res.codeword_decoded.assign(d, 0);
    res.iterations_run = 1;

    for (int s = 0; s < 2; ++s) {
        std::vector<double> flat(sys.frame_bits());
        for (int p = 0; p < L; ++p) {
            const int r = MarcSystem::matrix_row(s, p);
            const int partner = MarcSystem::matrix_row(1 - s, p);
            for (int j = 0; j < c; ++j)
                flat[static_cast<std::size_t>(p) * c + j] =
                    llr.at(r, j) + boxplus(llr.at(partner, j), llr.at(d + p, j));
        }
        auto code_order = permute(sys.deinterleaver(s), flat);
        for (int p = 0; p < L; ++p) {
            const int cw = s * L + p;
            std::vector<std::uint8_t> hard(c);
            for (int i = 0; i < c; ++i)
                hard[i] = hard_bit(code_order[static_cast<std::size_t>(p) * c + i]);
            if (auto dec = sys.rs().bm_decode(bits_to_symbols(sys.config().m, hard))) {
                res.messages[cw] = std::move(dec->message);
                res.codeword_decoded[cw] = 1;
            } else {
                res.messages[cw] = message_from_bits(sys.rs(), sys.config().m, hard);
            }
        }
    }
    return res;
}

} // namespace marc
