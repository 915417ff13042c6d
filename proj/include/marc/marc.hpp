#ifndef MARC_MARC_HPP
#define MARC_MARC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "marc/abp.hpp"
#include "marc/conv.hpp"
#include "marc/phy.hpp"
#include "marc/rng.hpp"
#include "marc/rs.hpp"

namespace marc {

// Five-slot transmission pattern per packet pair: broadcast, Alamouti-style
// cooperative retransmission, then the relay's network parity.
struct SlotDescription {
    const char* transmitter;
    const char* payload;
};
inline constexpr SlotDescription kSlotSchedule[5] = {
    {"user1", "s1"},       {"user2", "s2"},           {"user1", "-conj(s2)"},
    {"user2", "conj(s1)"}, {"relay", "network parity"},
};

enum class RelayMode { Ideal, DecodeForward };

struct MarcConfig {
    // Reed-Solomon component code over GF(2^m), N = 2^m - 1.
    int m = 5;
    std::uint32_t primitive_poly = 0x25;
    int k = 25;
    int packets_per_user = 2; // L: Reed-Solomon codewords per user per frame

    // Recursive systematic convolutional network code at the relay,
    // applied column-wise across the stacked packet rows.
    unsigned conv_feedback = 07;
    unsigned conv_feedforward = 05;
    // Keep the trailing half of each column's parity stream: with the
    // recursive encoder restarted per column and left unterminated, early
    // parities cover only leading rows, so keeping the last ones is the
    // phase in which every row influences at least one surviving parity.
    std::vector<int> puncture_mask = {0, 0, 1, 1};

    // Each user's whole frame (L*N*m bits) is permuted before packetization.
    std::uint64_t interleaver_seed1 = 0x5eed0001u;
    std::uint64_t interleaver_seed2 = 0x5eed0002u;

    RelayMode relay_mode = RelayMode::DecodeForward;
    double relay_snr_offset_db = 0.0; // source->relay SNR relative to the axis value

    int joint_iterations = 20;
    AbpConfig abp{.inner_iterations = 5};
    bool pin_decoded_rows = true; // freeze codewords at +-clip once decoded
    // Accept an algebraic-fallback decode only if the total channel |LLR| it
    // contradicts stays below this budget (0 disables the guard; decodes that
    // satisfy the parity check in the soft domain are always accepted).  A
    // correct decode flips mostly near-zero LLRs; a miscorrection flips whole
    // symbols at arbitrary reliability.
    double pin_guard_llr = 20.0;
};

enum class RowLabel : std::uint8_t { User1 = 0, User2 = 1, RelayParity = 2 };

struct LlrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v; // row-major
    std::vector<RowLabel> labels;

    LlrMatrix() = default;
    LlrMatrix(int r, int c)
        : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0),
          labels(r, RowLabel::User1) {}
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    std::vector<double> row(int r) const {
        return {v.begin() + static_cast<std::ptrdiff_t>(r) * cols,
                v.begin() + static_cast<std::ptrdiff_t>(r + 1) * cols};
    }
};

// Little-endian binary dump: "MRCD", u32 version, u32 rows, u32 cols, one
// label byte per row, then row-major doubles.  Debugging aid, not a stable
// format.
void save_llr_matrix(const LlrMatrix& m, const std::string& path);
LlrMatrix load_llr_matrix(const std::string& path);

// Fisher-Yates permutation of {0..n-1}; out[i] = in[perm[i]] when applied.
std::vector<int> build_interleaver(int n, std::uint64_t seed);
std::vector<int> invert_permutation(const std::vector<int>& perm);

template <typename T>
std::vector<T> permute(const std::vector<int>& perm, const std::vector<T>& in) {
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out[i] = in[perm[i]];
    return out;
}

// Everything derived from a MarcConfig that is reused across trials: the
// component codes and the per-source frame interleavers.  The transmitted
// frame is a bit matrix whose first 2L rows hold the two users' interleaved
// packets in alternating order (rows 2p and 2p+1 are user 1's and user 2's
// packet p) and whose last rows carry the relay's punctured column-wise
// convolutional parity.  Codewords are indexed source*L + packet throughout.
class MarcSystem {
  public:
    explicit MarcSystem(MarcConfig config);

    const MarcConfig& config() const { return cfg_; }
    const RsCode& rs() const { return rs_; }
    const ConvCode& conv() const { return conv_; }
    const PuncturePattern& puncture() const { return punct_; }

    int packets_per_user() const { return cfg_.packets_per_user; }
    int data_rows() const { return 2 * cfg_.packets_per_user; }
    int parity_rows() const { return punct_.survivors(data_rows()); }
    int total_rows() const { return data_rows() + parity_rows(); }
    int cols() const { return rs_.codeword_bits(); }
    int frame_bits() const { return cfg_.packets_per_user * cols(); } // per source
    int codewords() const { return data_rows(); }

    static int matrix_row(int source, int packet) { return 2 * packet + source; }

    // Transmitted data packets over total packet transmissions; every data
    // packet is sent twice (direct slot + cooperative retransmission).  The
    // headline value for the default geometry is 2/5; it ignores the
    // Reed-Solomon rate and is the convention used for the Eb/N0 axis.
    double axis_rate() const {
        return static_cast<double>(data_rows()) / (2 * data_rows() + parity_rows());
    }
    // Information bits over total transmitted bits (axis_rate * K/N).
    double info_rate() const { return axis_rate() * rs_.k() / rs_.n(); }
    // Unit-energy symbols: Es/N0 = axis_rate * Eb/N0.
    double n0_at(double eb_n0_db) const { return n0_from_ebn0_db(eb_n0_db, axis_rate()); }

    const std::vector<int>& interleaver(int source) const { return ilv_[source]; }
    const std::vector<int>& deinterleaver(int source) const { return dilv_[source]; }

    // One message per codeword, indexed source*L + packet.
    std::vector<std::vector<Symbol>> random_messages(Rng& rng) const;

    // Encode one source's L messages, interleave the concatenated frame with
    // the source's permutation, and cut it into L rows of N*m bits.
    std::vector<std::vector<std::uint8_t>> build_source_frame(
        int source, const std::vector<std::vector<Symbol>>& messages) const;

    // All data rows in matrix order from the flat 2L message list.
    std::vector<std::vector<std::uint8_t>> source_rows(
        const std::vector<std::vector<Symbol>>& messages) const;

    // Column-wise recursive convolutional parity over the data rows, after
    // puncturing: parity_rows() x cols() bits.
    std::vector<std::vector<std::uint8_t>> relay_network_encode(
        const std::vector<std::vector<std::uint8_t>>& data) const;

  private:
    MarcConfig cfg_;
    RsCode rs_;
    ConvCode conv_;
    PuncturePattern punct_;
    std::vector<int> ilv_[2];  // frame position -> code-order position
    std::vector<int> dilv_[2]; // inverse
};

struct RoundTruth {
    std::vector<std::vector<Symbol>> messages;          // per codeword (source*L + packet)
    std::vector<std::vector<std::uint8_t>> code_bits;   // per codeword, code order
    std::vector<std::vector<std::uint8_t>> matrix_rows; // interleaved, as transmitted
};

struct ChannelRound {
    LlrMatrix llr; // total_rows x cols, destination channel LLRs in matrix order
    RoundTruth truth;
    // Decode-and-forward only: packets the relay could not decode this frame.
    // The relay forwards selectively — convolutional parity (which mixes all
    // rows) is dropped entirely on any failure, an XOR row only when its own
    // pair failed — so affected parity rows reach the destination as LLR-0
    // erasures rather than poisoned observations.
    int relay_decode_failures = 0;
};

// One frame over the cooperative channel: per packet pair, two Alamouti
// receive instants combine the direct and retransmitted copies; each relay
// parity row arrives over its own Rayleigh link.  Every fading coefficient
// is CN(0,1), constant per row.
ChannelRound simulate_round(const MarcSystem& sys, double eb_n0_db, Rng& rng);

// Same reception geometry, but the relay transmits the per-pair XOR of the
// two users' rows instead of convolutional parity (one parity row per pair).
ChannelRound simulate_xor_round(const MarcSystem& sys, double eb_n0_db, Rng& rng);

struct IterationStat {
    int message_bit_errors = 0; // only filled when truth is supplied
    int message_bits = 0;
    int codewords_decoded = 0;
    bool converged = false;
};

struct JointResult {
    std::vector<std::vector<Symbol>> messages; // per codeword: decoded or hard fallback
    std::vector<char> codeword_decoded;        // parity satisfied or BM accepted
    std::vector<IterationStat> per_iteration;  // one entry per configured iteration
    int iterations_run = 0;
};

// Iterative joint network/channel decoding: each pass runs the column-wise
// trellis SISO with the packet decoders' re-interleaved extrinsics as a
// priori, then one adaptive-BP invocation per codeword with the deinterleaved
// trellis extrinsics as a priori.  Decoded codewords stay decoded; with
// pin_decoded_rows their a priori is frozen at +-llr_clip.  Stops early once
// every codeword is decoded (later per_iteration entries repeat the
// converged state).
JointResult joint_decode(const MarcSystem& sys, const LlrMatrix& llr,
                         const std::vector<std::vector<Symbol>>* truth = nullptr);

// Non-iterative reference receiver for the XOR relay: partner and relay
// observations are chained through the soft-XOR and added to the direct
// LLRs, then each codeword is decoded algebraically.
JointResult xor_decode(const MarcSystem& sys, const LlrMatrix& llr);

// Total differing bits between two equal-shaped symbol message lists.
int message_bit_errors(const std::vector<std::vector<Symbol>>& a,
                       const std::vector<std::vector<Symbol>>& b);

} // namespace marc

#endif
