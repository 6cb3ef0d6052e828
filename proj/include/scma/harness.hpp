#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "scma/codebook.hpp"
#include "scma/config.hpp"
#include "scma/decoders.hpp"
#include "scma/grantfree.hpp"
#include "scma/jointrx.hpp"

namespace scma {

struct ResultTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write_csv(std::ostream& os) const;
    std::string csv() const;
};

/// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_double(double v);

Codebook make_codebook(const ExperimentConfig& cfg);

/// Runs decoder `tag` (see decoder.list) on one received frame.
DecodeResult run_decoder(const std::string& tag, const Codebook& cb, const Received& rx,
                         const ExperimentConfig& cfg);

bool is_tree_decoder(const std::string& tag);

struct LinkPoint {
    double snr_db = 0.0;
    long frames = 0;
    long total_bits = 0;                   // per decoder
    std::vector<long> bit_errors;          // per decoder
    std::vector<std::vector<long>> visited;  // [decoder][level], summed over frames and subcarriers
};

/// All configured decoders on identical frames for every SNR point.
std::vector<LinkPoint> simulate_link(const ExperimentConfig& cfg);

ResultTable run_ber(const ExperimentConfig& cfg);
ResultTable run_nodes(const ExperimentConfig& cfg);

struct GrantFreeCell {
    std::string traffic;
    double p_active = 0.0;
    MappingScheme scheme = MappingScheme::static_map;
    ContentionStats pooled;
    std::vector<double> replica_collision_prob;
};

/// Cells ordered by traffic model, then p_active, then scheme (static
/// first). Both schemes of a cell see the same replica seeds.
std::vector<GrantFreeCell> simulate_grantfree(const ExperimentConfig& cfg);

ResultTable run_grantfree(const ExperimentConfig& cfg);

inline constexpr std::array<const char*, 3> kJointAlgorithms = {"joint", "pilot_only", "genie"};

struct JointPacketResult {
    std::array<int, 3> activity_errors{};
    std::array<long, 3> bit_errors{};
    long bits = 0;  // bits of truly active users
};

std::vector<JointPacketResult> simulate_jointrx_point(const ExperimentConfig& cfg, const Codebook& cb,
                                                      const PilotBook& pilots, int snr_index);

JointConfig joint_config(const ExperimentConfig& cfg);
PilotBook make_pilot_book(const ExperimentConfig& cfg, const Codebook& cb);

ResultTable run_jointrx(const ExperimentConfig& cfg);

/// Miss and false-alarm rates of the joint and pilot-only activity scores
/// over the jointrx.roc_gamma grid; used to calibrate jointrx.gamma.
ResultTable run_roc(const ExperimentConfig& cfg);

ResultTable run_codebook_report(const ExperimentConfig& cfg);

/// Dispatches on cfg.experiment.
ResultTable run_experiment(const ExperimentConfig& cfg);

}  // namespace scma
