#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace scma {

/// Flat `dotted.key = value` pairs. `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& is);
KeyValues load_key_values(const std::string& path);

/// Splits `key=value`; throws ConfigError without '='.
std::pair<std::string, std::string> split_assignment(const std::string& text);

struct ExperimentConfig {
    std::string experiment = "ber";

    int K = 4;
    int N = 2;
    int J = 6;
    int M = 16;
    std::string codebook_scheme = "star_qam";  // star_qam | low_projection | file
    std::string codebook_labeling = "gray";   // gray | natural
    std::string codebook_file;
    std::string codebook_out;  // codebook-report writes the codebook here when set

    std::string channel = "rayleigh_iid";  // awgn | rayleigh_iid | tapped_delay
    int channel_L = 1;

    std::vector<double> snr_db = {6, 9, 12, 15};
    long frames = 20000;
    std::uint64_t seed = 1;
    int workers = 1;

    std::vector<std::string> decoders = {"max_log", "pm", "lsd", "np_lsd"};
    int list_size = 32;
    int max_iters = 10;
    int pm_t_judge = 2;
    int pm_n_judge = 3;
    int np_rounds = 1;

    int gf_n_ue = 60;
    int gf_n_ctu = 6;
    std::vector<double> gf_p_active = {0.1, 0.3, 0.5};
    std::vector<std::string> gf_traffic = {"bernoulli", "bursty"};
    double gf_bursty_p = 0.3;
    double gf_mean_burst = 5.0;
    int gf_delay = 3;
    long gf_slots = 100000;
    int gf_replicas = 50;
    bool gf_retransmit = true;
    bool gf_reindex_ids = false;

    int jr_packet_bits = 256;
    int jr_pilot_slots = 8;
    double jr_p_active = 0.5;
    int jr_L = 1;
    double jr_gamma = 0.2;
    std::vector<double> jr_roc_gamma = {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 2.0, 3.0};
    int jr_outer_iters = 10;
    double jr_damping = 0.5;
    double jr_prior_a = 1e-7;
    double jr_prior_b = 1e-7;
    std::uint64_t jr_pilot_seed = 7;

    std::string out;  // empty -> stdout
};

/// Applies key/value pairs on top of the defaults; unknown keys and
/// malformed values throw ConfigError. Validates the result.
ExperimentConfig make_config(const KeyValues& kv, ExperimentConfig base = {});

/// Throws ConfigError on inconsistent settings.
void validate(const ExperimentConfig& cfg);

/// Every recognised key, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace scma
