#pragma once

#include <vector>

#include <Eigen/Dense>

#include "scma/codebook.hpp"
#include "scma/fn_kernel.hpp"
#include "scma/types.hpp"

namespace scma {

/// One received SCMA symbol with the channel the detector assumes.
struct Received {
    CVec y;                 // K entries
    Eigen::MatrixXcd gains;  // K x J
    double noise_var = 1.0;
};

struct DecodeResult {
    std::vector<std::vector<double>> posteriors;  // [user][point], probabilities
    std::vector<int> symbols;                     // argmax point per user
    std::vector<std::vector<int>> hard_bits;      // per user, MSB first
    int iterations_used = 0;
    std::vector<std::vector<long>> visited_nodes;  // [subcarrier][tree level]
    std::vector<int> candidate_list_sizes;         // per subcarrier
    long hypotheses_evaluated = 0;                 // function-node hypotheses, all iterations
};

inline constexpr double kConvergenceTol = 1e-6;

DecodeResult mpa_decode(const Codebook& cb, const Received& rx, int max_iters);
DecodeResult max_log_mpa(const Codebook& cb, const Received& rx, int max_iters);

/// MPA whose function nodes enumerate distinct projected values instead of
/// labels. Messages match the label-level kernel.
DecodeResult projected_mpa(const Codebook& cb, const Received& rx, int max_iters,
                           FnMode mode = FnMode::max_log);

/// Max-log MPA that hard-decides the n_judge most confident users after
/// t_judge iterations, cancels them and continues with the rest.
DecodeResult pm_mpa(const Codebook& cb, const Received& rx, int t_judge, int n_judge,
                    int max_iters);

/// Candidate list of one subcarrier search.
struct CandidateList {
    std::vector<std::vector<int>> combos;  // alternative index per colliding user (input order)
    std::vector<double> metrics;           // |y - sum|^2, non-decreasing
    std::vector<long> visited_per_level;   // level 0 = first searched user
};

/// One subcarrier's search problem. `values[i][a]` is the received
/// contribution h * x of alternative a of colliding user i.
struct SubcarrierSearch {
    cplx y;
    std::vector<CVec> values;
    std::vector<double> gain_abs;             // |h| per user, sets the level order
    std::vector<std::vector<bool>> allowed;   // [i][a]; empty means all allowed
};

/// Depth-first list sphere search returning the exact list_size best
/// combinations among allowed alternatives. Levels follow descending |h|;
/// a branch is pruned when the triangle-inequality bound on its best
/// completion reaches the current list radius.
CandidateList lsd_subcarrier(const SubcarrierSearch& problem, int list_size);

DecodeResult lsd_mpa(const Codebook& cb, const Received& rx, int list_size, int max_iters,
                     bool use_projection = false);

/// LSD-MPA with cross-subcarrier node pruning: each subcarrier's list
/// restricts the symbols later subcarriers may expand.
DecodeResult np_lsd_mpa(const Codebook& cb, const Received& rx, int list_size, int rounds,
                        int max_iters, bool use_projection = false);

struct BruteForceResult {
    std::vector<std::vector<double>> marginals;  // [user][point]
    std::vector<int> ml_combo;
    long combos = 0;
};

inline constexpr double kBruteForceGuard = 1e7;

BruteForceResult brute_force_map(const Codebook& cb, const Received& rx);

}  // namespace scma
