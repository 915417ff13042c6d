#include "marc/run_config.hpp"

#include <cmath>
#include <sstream>

#include "marc/errors.hpp"

namespace marc {

std::string relay_mode_to_string(RelayMode mode) {
    return mode == RelayMode::Ideal ? "ideal" : "decode-forward";
}

RelayMode relay_mode_from_string(const std::string& s) {
    if (s == "ideal") return RelayMode::Ideal;
    if (s == "decode-forward") return RelayMode::DecodeForward;
    throw ConfigError("unknown relay mode '" + s + "' (expected ideal|decode-forward)");
}

std::string octal_string(int value) {
    std::ostringstream os;
    os << std::oct << value;
    return os.str();
}

int parse_octal(const std::string& s) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos, 8);
        if (pos != s.size() || v < 0) throw ConfigError("bad octal value '" + s + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad octal value '" + s + "'");
    }
}

std::string hex_string(std::uint32_t value) {
    std::ostringstream os;
    os << "0x" << std::hex << value;
    return os.str();
}

std::uint32_t parse_hex(const std::string& s) {
    try {
        std::size_t pos = 0;
        unsigned long v = std::stoul(s, &pos, 0);
        if (pos != s.size() || v > 0xFFFFFFFFul)
            throw ConfigError("bad polynomial value '" + s + "'");
        return static_cast<std::uint32_t>(v);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad polynomial value '" + s + "'");
    }
}

void RunConfig::validate() const {
    if (baseline != "conv" && baseline != "xor")
        throw ConfigError("baseline must be conv or xor, got '" + baseline + "'");
    if (eb_n0_grid.empty()) throw ConfigError("eb_n0_grid must not be empty");
    for (double db : eb_n0_grid)
        if (!std::isfinite(db)) throw ConfigError("eb_n0_grid values must be finite");
    if (min_trials < 1) throw ConfigError("min_trials must be >= 1");
    if (max_trials < min_trials) throw ConfigError("max_trials must be >= min_trials");
    if (min_frame_errors < 1) throw ConfigError("min_frame_errors must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (exit_trials < 1) throw ConfigError("exit_trials must be >= 1");
    if (!(exit_ia_step > 0.0 && exit_ia_step <= 1.0))
        throw ConfigError("exit_ia_step must be in (0, 1]");
    if (!std::isfinite(exit_eb_n0_db)) throw ConfigError("exit_eb_n0_db must be finite");
    MarcSystem probe(marc); // rejects inconsistent code/frame parameters
    (void)probe;
}

BerConfig RunConfig::ber_config() const {
    BerConfig b;
    b.eb_n0_grid = eb_n0_grid;
    b.min_frame_errors = min_frame_errors;
    b.min_trials = min_trials;
    b.max_trials = max_trials;
    b.batch = batch;
    b.threads = threads;
    b.seed = seed;
    b.xor_baseline = baseline == "xor";
    return b;
}

ExitConfig RunConfig::exit_config() const {
    ExitConfig e;
    e.trials = exit_trials;
    e.seed = seed;
    e.include_channel_term = exit_include_channel;
    e.i_a_grid.clear();
    for (double x = 0.0; x < 1.0 - 1e-9; x += exit_ia_step) e.i_a_grid.push_back(x);
    e.i_a_grid.push_back(1.0);
    return e;
}

namespace {

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

} // namespace

void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{
        {"seed", c.seed},
        {"marc",
         {{"m", c.marc.m},
          {"primitive_poly", hex_string(c.marc.primitive_poly)},
          {"k", c.marc.k},
          {"packets_per_user", c.marc.packets_per_user},
          {"conv_feedback", octal_string(c.marc.conv_feedback)},
          {"conv_feedforward", octal_string(c.marc.conv_feedforward)},
          {"puncture_mask", c.marc.puncture_mask},
          {"interleaver_seed1", c.marc.interleaver_seed1},
          {"interleaver_seed2", c.marc.interleaver_seed2},
          {"relay_mode", relay_mode_to_string(c.marc.relay_mode)},
          {"relay_snr_offset_db", c.marc.relay_snr_offset_db},
          {"joint_iterations", c.marc.joint_iterations},
          {"pin_decoded_rows", c.marc.pin_decoded_rows},
          {"pin_guard_llr", c.marc.pin_guard_llr},
          {"abp",
           {{"inner_iterations", c.marc.abp.inner_iterations},
            {"damping", c.marc.abp.damping},
            {"llr_clip", c.marc.abp.llr_clip}}}}},
        {"ber",
         {{"eb_n0_grid", c.eb_n0_grid},
          {"min_frame_errors", c.min_frame_errors},
          {"min_trials", c.min_trials},
          {"max_trials", c.max_trials},
          {"batch", c.batch},
          {"threads", c.threads},
          {"baseline", c.baseline}}},
        {"exit",
         {{"eb_n0_db", c.exit_eb_n0_db},
          {"trials", c.exit_trials},
          {"ia_step", c.exit_ia_step},
          {"include_channel", c.exit_include_channel}}}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
    get_if(j, "seed", c.seed);
    if (j.contains("marc")) {
        const auto& m = j.at("marc");
        get_if(m, "m", c.marc.m);
        if (m.contains("primitive_poly"))
            c.marc.primitive_poly = parse_hex(m.at("primitive_poly").get<std::string>());
        get_if(m, "k", c.marc.k);
        get_if(m, "packets_per_user", c.marc.packets_per_user);
        if (m.contains("conv_feedback"))
            c.marc.conv_feedback = parse_octal(m.at("conv_feedback").get<std::string>());
        if (m.contains("conv_feedforward"))
            c.marc.conv_feedforward = parse_octal(m.at("conv_feedforward").get<std::string>());
        get_if(m, "puncture_mask", c.marc.puncture_mask);
        get_if(m, "interleaver_seed1", c.marc.interleaver_seed1);
        get_if(m, "interleaver_seed2", c.marc.interleaver_seed2);
        if (m.contains("relay_mode"))
            c.marc.relay_mode = relay_mode_from_string(m.at("relay_mode").get<std::string>());
        get_if(m, "relay_snr_offset_db", c.marc.relay_snr_offset_db);
        get_if(m, "joint_iterations", c.marc.joint_iterations);
        get_if(m, "pin_decoded_rows", c.marc.pin_decoded_rows);
        get_if(m, "pin_guard_llr", c.marc.pin_guard_llr);
        if (m.contains("abp")) {
            const auto& a = m.at("abp");
            get_if(a, "inner_iterations", c.marc.abp.inner_iterations);
            get_if(a, "damping", c.marc.abp.damping);
            get_if(a, "llr_clip", c.marc.abp.llr_clip);
        }
    }
    if (j.contains("ber")) {
        const auto& b = j.at("ber");
        get_if(b, "eb_n0_grid", c.eb_n0_grid);
        get_if(b, "min_frame_errors", c.min_frame_errors);
        get_if(b, "min_trials", c.min_trials);
        get_if(b, "max_trials", c.max_trials);
        get_if(b, "batch", c.batch);
        get_if(b, "threads", c.threads);
        get_if(b, "baseline", c.baseline);
    }
    if (j.contains("exit")) {
        const auto& e = j.at("exit");
        get_if(e, "eb_n0_db", c.exit_eb_n0_db);
        get_if(e, "trials", c.exit_trials);
        get_if(e, "ia_step", c.exit_ia_step);
        get_if(e, "include_channel", c.exit_include_channel);
    }
}

} // namespace marc
