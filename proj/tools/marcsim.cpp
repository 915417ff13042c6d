#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "marc/abp.hpp"
#include "marc/analysis.hpp"
#include "marc/conv.hpp"
#include "marc/errors.hpp"
#include "marc/gf.hpp"
#include "marc/llr.hpp"
#include "marc/marc.hpp"
#include "marc/phy.hpp"
#include "marc/rng.hpp"
#include "marc/rs.hpp"
#include "marc/run_config.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.10g", v);
    return b;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw marc::Error("cannot open output file: " + path);
    os << body;
    os.flush();
    if (!os) throw marc::Error("failed writing: " + path);
}

// Option storage shared by the subcommands; string-typed fields are decoded
// in finalize().
struct Options {
    marc::RunConfig rc;
    std::string primitive_poly = marc::hex_string(marc::MarcConfig{}.primitive_poly);
    std::string conv_feedback = marc::octal_string(marc::MarcConfig{}.conv_feedback);
    std::string conv_feedforward = marc::octal_string(marc::MarcConfig{}.conv_feedforward);
    std::string relay_mode = marc::relay_mode_to_string(marc::MarcConfig{}.relay_mode);
    std::vector<int> puncture_mask = {1, 0};

    void finalize() {
        rc.marc.primitive_poly = marc::parse_hex(primitive_poly);
        rc.marc.conv_feedback = marc::parse_octal(conv_feedback);
        rc.marc.conv_feedforward = marc::parse_octal(conv_feedforward);
        rc.marc.relay_mode = marc::relay_mode_from_string(relay_mode);
        rc.marc.puncture_mask.assign(puncture_mask.begin(), puncture_mask.end());
        rc.validate();
    }
};

void add_marc_options(CLI::App* cmd, Options& o) {
    cmd->set_config("--config", "", "INI config file (sections map to dotted option names)");
    cmd->add_option("--seed", o.rc.seed, "master RNG seed")->capture_default_str();
    cmd->add_option("--marc.m", o.rc.marc.m, "field degree (symbols in GF(2^m))")
        ->capture_default_str();
    cmd->add_option("--marc.primitive-poly", o.primitive_poly,
                    "field polynomial, hex (e.g. 0x25)")
        ->capture_default_str();
    cmd->add_option("--marc.k", o.rc.marc.k, "packet code dimension K")->capture_default_str();
    cmd->add_option("--marc.packets-per-user", o.rc.marc.packets_per_user,
                    "packets per user per round")
        ->capture_default_str();
    cmd->add_option("--marc.conv-feedback", o.conv_feedback,
                    "relay recursive generator, octal")
        ->capture_default_str();
    cmd->add_option("--marc.conv-feedforward", o.conv_feedforward,
                    "relay feedforward generator, octal")
        ->capture_default_str();
    cmd->add_option("--marc.puncture-mask", o.puncture_mask,
                    "relay parity puncture mask (e.g. 1 0)")
        ->capture_default_str();
    cmd->add_option("--marc.interleaver-seed1", o.rc.marc.interleaver_seed1,
                    "user 1 frame interleaver seed")
        ->capture_default_str();
    cmd->add_option("--marc.interleaver-seed2", o.rc.marc.interleaver_seed2,
                    "user 2 frame interleaver seed")
        ->capture_default_str();
    cmd->add_option("--marc.relay-mode", o.relay_mode, "ideal|decode-forward")
        ->check(CLI::IsMember({"ideal", "decode-forward"}))
        ->capture_default_str();
    cmd->add_option("--marc.relay-offset-db,--relay-offset-db", o.rc.marc.relay_snr_offset_db,
                    "relay receive SNR advantage over the destination, dB")
        ->capture_default_str();
    cmd->add_option("--marc.joint-iterations,--iterations", o.rc.marc.joint_iterations,
                    "joint decoder iterations")
        ->capture_default_str();
    cmd->add_option("--marc.pin-decoded-rows", o.rc.marc.pin_decoded_rows,
                    "clamp feedback of already-decoded packets")
        ->capture_default_str();
    cmd->add_option("--marc.pin-guard-llr", o.rc.marc.pin_guard_llr,
                    "contradicted-|LLR| budget for accepting fallback decodes (0 = off)")
        ->capture_default_str();
    cmd->add_option("--abp.inner-iterations", o.rc.marc.abp.inner_iterations,
                    "adaptive-BP rounds per activation")
        ->capture_default_str();
    cmd->add_option("--abp.damping", o.rc.marc.abp.damping, "belief-propagation damping factor")
        ->capture_default_str();
    cmd->add_option("--abp.llr-clip", o.rc.marc.abp.llr_clip, "LLR clipping magnitude")
        ->capture_default_str();
}

nlohmann::json make_meta(const std::string& command, const Options& o,
                         const marc::MarcSystem& sys) {
    return nlohmann::json{{"tool", "marcsim"},
                          {"version", kVersion},
                          {"command", command},
                          {"seed", o.rc.seed},
                          {"axis_rate", sys.axis_rate()},
                          {"info_rate", sys.info_rate()},
                          {"config", o.rc}};
}

void write_meta(const std::string& output, const std::string& command, const Options& o,
                const marc::MarcSystem& sys, nlohmann::json extra = {}) {
    nlohmann::json j = make_meta(command, o, sys);
    for (auto& [k, v] : extra.items()) j[k] = v;
    write_text(output + ".meta.json", j.dump(2) + "\n");
}

int run_ber(const Options& o, const std::string& output) {
    marc::MarcSystem sys(o.rc.marc);
    auto res = marc::ber_sweep(sys, o.rc.ber_config());
    std::ostringstream csv;
    csv << "eb_n0_db,iteration,bit_errors,total_bits,ber,fer,trials,ci_low,ci_high\n";
    for (const auto& p : res.points) {
        csv << fmt(p.eb_n0_db) << ',' << p.iteration << ',' << p.bit_errors << ','
            << p.total_bits << ',' << fmt(p.ber) << ',' << fmt(p.fer) << ',' << p.trials << ','
            << fmt(p.ci_low) << ',' << fmt(p.ci_high) << '\n';
    }
    write_text(output, csv.str());
    write_meta(output, "ber", o, sys);
    std::cout << "wrote " << res.points.size() << " rows to " << output << "\n";
    return 0;
}

int run_exit(const Options& o, const std::string& output, const std::string& which) {
    marc::MarcSystem sys(o.rc.marc);
    auto cfg = o.rc.exit_config();
    std::vector<marc::ExitCurve> curves;
    if (which == "both" || which == "inner")
        curves.push_back(marc::exit_inner(sys, o.rc.exit_eb_n0_db, cfg));
    if (which == "both" || which == "outer") curves.push_back(marc::exit_outer(sys, cfg));
    std::ostringstream csv;
    csv << "decoder,eb_n0_db,i_a,i_e,trials\n";
    std::size_t rows = 0;
    for (const auto& c : curves)
        for (const auto& p : c.points) {
            csv << c.decoder << ',' << fmt(c.eb_n0_db) << ',' << fmt(p.i_a) << ','
                << fmt(p.i_e) << ',' << c.trials << '\n';
            ++rows;
        }
    write_text(output, csv.str());
    write_meta(output, "exit", o, sys, {{"decoders", which}});
    std::cout << "wrote " << rows << " rows to " << output << "\n";
    return 0;
}

std::string messages_text(const std::vector<std::vector<marc::Symbol>>& messages) {
    std::ostringstream os;
    for (const auto& msg : messages) {
        for (std::size_t i = 0; i < msg.size(); ++i) os << (i ? " " : "") << msg[i];
        os << '\n';
    }
    return os.str();
}

std::vector<std::vector<marc::Symbol>> load_messages(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw marc::Error("cannot open messages file: " + path);
    std::vector<std::vector<marc::Symbol>> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<marc::Symbol> msg;
        long v;
        while (ls >> v) msg.push_back(static_cast<marc::Symbol>(v));
        out.push_back(std::move(msg));
    }
    return out;
}

int run_encode(const Options& o, const std::string& output, double eb_n0_db) {
    marc::MarcSystem sys(o.rc.marc);
    marc::Rng rng(o.rc.seed);
    marc::ChannelRound round = marc::simulate_round(sys, eb_n0_db, rng);
    marc::save_llr_matrix(round.llr, output + ".llr");
    write_text(output + ".messages.txt", messages_text(round.truth.messages));
    write_meta(output, "encode", o, sys,
               {{"eb_n0_db", eb_n0_db}, {"relay_decode_failures", round.relay_decode_failures}});
    std::cout << "wrote " << output << ".llr (" << round.llr.rows << "x" << round.llr.cols
              << ") and " << output << ".messages.txt\n";
    return 0;
}

int run_decode(const Options& o, const std::string& input, const std::string& output,
               const std::string& truth_path) {
    marc::MarcSystem sys(o.rc.marc);
    marc::LlrMatrix llr = marc::load_llr_matrix(input);
    marc::JointResult res = marc::joint_decode(sys, llr);
    write_text(output, messages_text(res.messages));
    int decoded = 0;
    for (bool b : res.codeword_decoded) decoded += b ? 1 : 0;
    std::cout << "decoded " << decoded << "/" << res.codeword_decoded.size()
              << " packets via parity-check convergence in " << res.iterations_run
              << " iterations\n";
    if (!truth_path.empty()) {
        auto truth = load_messages(truth_path);
        int errs = marc::message_bit_errors(res.messages, truth);
        long long bits = static_cast<long long>(sys.codewords()) * sys.rs().message_bits();
        std::cout << "message bit errors vs truth: " << errs << " / " << bits << "\n";
    }
    return 0;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "ok" : "FAIL") << ": " << name << "\n";
        if (!ok) ++failures;
    };

    marc::Field f(4, 0x13);
    bool gf_ok = f.order() == 15 && f.mul(2, 8) == 3 && f.inv(1) == 1;
    for (marc::Symbol a = 1; a < f.size(); ++a)
        if (f.mul(a, f.inv(a)) != 1) gf_ok = false;
    check(gf_ok, "GF(16) arithmetic");

    bool threw = false;
    try {
        marc::Field bad(4, 0x1F);
    } catch (const marc::NonPrimitivePolynomial&) {
        threw = true;
    }
    check(threw, "non-primitive polynomial rejected");

    marc::RsCode rs(f, 7);
    marc::Rng rng(42);
    bool rs_ok = true;
    for (int t = 0; t < 100 && rs_ok; ++t) {
        std::vector<marc::Symbol> msg(7);
        for (auto& s : msg) s = static_cast<marc::Symbol>(rng.uniform_int(16));
        auto cw = rs.encode(msg);
        auto corrupted = cw;
        for (int e = 0; e < 4; ++e) {
            int pos;
            do {
                pos = static_cast<int>(rng.uniform_int(15));
            } while (corrupted[pos] != cw[pos]);
            corrupted[pos] = static_cast<marc::Symbol>(cw[pos] ^ (1 + rng.uniform_int(15)));
        }
        auto dec = rs.bm_decode(corrupted);
        rs_ok = dec && dec->message == msg && dec->corrected == 4;
    }
    check(rs_ok, "packet code corrects 4 of 15 symbols");

    const auto& h = rs.binary_parity_check().matrix;
    bool h_ok = h.rows() == 32 && h.cols() == 60 && h.rank() == 32;
    for (int t = 0; t < 100 && h_ok; ++t) {
        std::vector<marc::Symbol> msg(7);
        for (auto& s : msg) s = static_cast<marc::Symbol>(rng.uniform_int(16));
        auto bits = marc::symbols_to_bits(4, rs.encode(msg));
        h_ok = h.mul_vec_is_zero(bits);
    }
    check(h_ok, "binary parity check annihilates codewords");

    marc::ConvCode cc(07, 05);
    std::vector<std::uint8_t> impulse(9, 0);
    impulse[0] = 1;
    auto par = cc.encode_parity(impulse);
    std::vector<std::uint8_t> expect = {1, 1, 1, 0, 1, 1, 0, 1, 1};
    check(par == expect, "recursive encoder impulse response");

    bool bp_ok = true;
    for (int t = 0; t < 1000; ++t) {
        double a = (rng.uniform() - 0.5) * 8.0, b = (rng.uniform() - 0.5) * 8.0;
        double ref = 2.0 * std::atanh(std::tanh(a / 2.0) * std::tanh(b / 2.0));
        if (std::fabs(marc::boxplus(a, b) - ref) > 1e-9) bp_ok = false;
    }
    check(bp_ok, "boxplus matches tanh rule");

    bool al_ok = true;
    for (int t = 0; t < 100; ++t) {
        marc::Complex h1 = rng.cgaussian(1.0), h2 = rng.cgaussian(1.0);
        int b1 = rng.bit(), b2 = rng.bit();
        marc::Complex s1 = marc::bpsk_map_bit(b1), s2 = marc::bpsk_map_bit(b2);
        auto [t1, t2] = marc::alamouti_encode(s1, s2);
        marc::Complex y1 = h1 * s1 + h2 * s2, y2 = h1 * t1 + h2 * t2;
        auto [l1, l2] = marc::alamouti_soft_decode(y1, y2, h1, h2, 1.0);
        if (marc::hard_bit(l1) != b1 || marc::hard_bit(l2) != b2) al_ok = false;
    }
    check(al_ok, "noiseless space-time combining recovers bits");

    check(std::fabs(marc::j_function(marc::j_inverse(0.5)) - 0.5) < 1e-6 &&
              marc::j_function(1.0) < marc::j_function(2.0),
          "mutual-information transfer function");

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-user cooperative relay link simulator: space-time transmission, "
                 "algebraic packet codes, and an iterative joint receiver"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Options opt;

    auto* ber = app.add_subcommand("ber", "Monte Carlo error-rate sweep over Eb/N0");
    add_marc_options(ber, opt);
    std::string ber_out = "ber.csv";
    std::string baseline = "conv";
    ber->add_option("-o,--output", ber_out, "output CSV path")->capture_default_str();
    ber->add_option("--baseline", baseline, "receiver: conv (joint iterative) or xor")
        ->check(CLI::IsMember({"conv", "xor"}))
        ->capture_default_str();
    ber->add_option("--ber.eb-n0-grid,--grid", opt.rc.eb_n0_grid, "Eb/N0 grid in dB")
        ->capture_default_str();
    ber->add_option("--ber.min-frame-errors", opt.rc.min_frame_errors,
                    "stop a point after this many frame errors")
        ->capture_default_str();
    ber->add_option("--ber.min-trials", opt.rc.min_trials, "minimum frames per point")
        ->capture_default_str();
    ber->add_option("--ber.max-trials", opt.rc.max_trials, "maximum frames per point")
        ->capture_default_str();
    ber->add_option("--ber.batch", opt.rc.batch, "frames between stopping checks")
        ->capture_default_str();
    ber->add_option("--ber.threads,--threads", opt.rc.threads,
                    "worker threads (0 = hardware)")
        ->capture_default_str();

    auto* exitc = app.add_subcommand("exit", "decoder transfer charts");
    add_marc_options(exitc, opt);
    std::string exit_out = "exit.csv";
    std::string which = "both";
    exitc->add_option("-o,--output", exit_out, "output CSV path")->capture_default_str();
    exitc->add_option("--decoder", which, "both|inner|outer")
        ->check(CLI::IsMember({"both", "inner", "outer"}))
        ->capture_default_str();
    exitc->add_option("--exit.eb-n0-db,--eb-n0-db", opt.rc.exit_eb_n0_db,
                      "channel Eb/N0 for the inner curve, dB")
        ->capture_default_str();
    exitc->add_option("--exit.trials", opt.rc.exit_trials, "frames/codewords per grid point")
        ->capture_default_str();
    exitc->add_option("--exit.ia-step", opt.rc.exit_ia_step, "a-priori information grid step")
        ->capture_default_str();
    exitc->add_option("--exit.include-channel", opt.rc.exit_include_channel,
                      "include systematic channel LLR in the inner output measure")
        ->capture_default_str();

    auto* enc = app.add_subcommand("encode",
                                   "simulate one transmission round and dump receiver LLRs");
    add_marc_options(enc, opt);
    std::string enc_out = "round";
    double enc_db = 7.0;
    enc->add_option("-o,--output", enc_out, "output prefix (.llr/.messages.txt)")
        ->capture_default_str();
    enc->add_option("--eb-n0-db", enc_db, "channel Eb/N0 in dB")->capture_default_str();

    auto* dec = app.add_subcommand("decode", "run the joint receiver on a dumped LLR matrix");
    add_marc_options(dec, opt);
    std::string dec_in, dec_out = "decoded.txt", dec_truth;
    dec->add_option("-i,--input", dec_in, "LLR matrix file")->required();
    dec->add_option("-o,--output", dec_out, "decoded messages path")->capture_default_str();
    dec->add_option("--truth", dec_truth, "reference messages file to count bit errors");

    auto* self = app.add_subcommand("selftest", "run quick built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        opt.rc.baseline = baseline;
        if (app.got_subcommand(self)) return run_selftest();
        opt.finalize();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(ber)) return run_ber(opt, ber_out);
        if (app.got_subcommand(exitc)) return run_exit(opt, exit_out, which);
        if (app.got_subcommand(enc)) return run_encode(opt, enc_out, enc_db);
        if (app.got_subcommand(dec)) return run_decode(opt, dec_in, dec_out, dec_truth);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
