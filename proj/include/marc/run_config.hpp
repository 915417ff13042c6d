#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "marc/analysis.hpp"
#include "marc/marc.hpp"

namespace marc {

std::string relay_mode_to_string(RelayMode mode);
RelayMode relay_mode_from_string(const std::string& s);

// Generator polynomials travel as octal strings ("7", "5"); the field
// polynomial as a hex string ("0x25").
std::string octal_string(int value);
int parse_octal(const std::string& s);
std::string hex_string(std::uint32_t value);
std::uint32_t parse_hex(const std::string& s);

// Everything a simulation run needs, shared by the BER and EXIT commands.
struct RunConfig {
    MarcConfig marc;
    std::uint64_t seed = 1;

    // BER sweep
    std::vector<double> eb_n0_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    long long min_frame_errors = 100;
    long long min_trials = 100;
    long long max_trials = 20000;
    int batch = 32;
    int threads = 1;
    std::string baseline = "conv"; // "conv" (joint decoder) or "xor"

    // EXIT charts
    double exit_eb_n0_db = 7.0;
    int exit_trials = 500;
    double exit_ia_step = 0.05;
    bool exit_include_channel = false;

    void validate() const;
    BerConfig ber_config() const;
    ExitConfig exit_config() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

} // namespace marc
