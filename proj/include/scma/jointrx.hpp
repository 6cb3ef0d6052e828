#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "scma/decoders.hpp"
#include "scma/phy.hpp"

namespace scma {

inline constexpr double kVarianceFloor = 1e-12;

/// Circular complex Gaussian belief.
struct GaussianMsg {
    cplx mean{};
    double var = 1.0;
};

struct MixtureComponent {
    double weight = 0.0;
    cplx mean{};
    double var = 0.0;
};

/// Gamma(a, b) prior on each tap precision.
struct SparsePrior {
    double a = 1e-7;
    double b = 1e-7;
};

/// Moment-matched Gaussian of a weighted mixture (weights need not sum to 1).
GaussianMsg ep_project(std::span<const MixtureComponent> mixture);

/// y = sum_i u_i + noise with Gaussian beliefs on u_i; returns the extrinsic
/// belief on each u_i.
std::vector<GaussianMsg> likelihood_update(cplx y, std::span<const GaussianMsg> incoming,
                                           double noise_var);

/// Per-codeword log-likelihood of one user in one data slot. `extrinsic`,
/// `gain_mean` and `gain_var` are indexed by support position. Entry M is
/// the silent (all-zero) hypothesis. When `per_position` is given it
/// receives the same terms split by support position.
std::vector<double> codeword_loglik(const Codebook& cb, int user,
                                    std::span<const GaussianMsg> extrinsic,
                                    std::span<const cplx> gain_mean,
                                    std::span<const double> gain_var,
                                    std::vector<std::vector<double>>* per_position = nullptr);

struct DataPosterior {
    std::vector<std::vector<double>> slots;  // [slot][M + 1], silent last
    double activity_llr = 0.0;               // log P(active) - log P(silent)
};

/// Combines a user's per-slot codeword log-likelihoods. Activity is a
/// packet-level variable: the user is silent in every slot or in none.
DataPosterior data_message(const std::vector<std::vector<double>>& slot_loglik, double prior_active);

/// Gaussian posterior over the stacked tap vector (user-major, J*L entries).
struct ChannelPosterior {
    Eigen::VectorXcd mean;
    Eigen::MatrixXcd cov;
};

/// Precision-weighted normal equations of rows y = a^T h + w, var(w) = s:
/// gram = sum conj(a) a^T / s, rhs = sum conj(a) y / s.
struct ChannelObservations {
    Eigen::MatrixXcd gram;
    Eigen::VectorXcd rhs;
};

/// Closed-form complex Gaussian update with per-entry prior precision.
/// Throws ParameterError if the combined precision is singular.
ChannelPosterior gaussian_posterior(const ChannelObservations& obs, const Eigen::VectorXd& precision);

/// Codeword beliefs feeding the channel update, [user][slot][support
/// position][M + 1]. Entry n excludes the observation on the user's n-th
/// subcarrier, so a row is never regressed on a symbol estimate that was
/// formed from that same row.
using SymbolBeliefs = std::vector<std::vector<std::vector<std::vector<double>>>>;

/// Pilot rows plus one pseudo-observation per data (slot, subcarrier): the
/// belief mean of each codeword entry is the regressor and its variance,
/// scaled by `gain_power` = E|g_kj|^2, is added to the row noise. Empty
/// `beliefs` skips data slots.
ChannelObservations channel_observations(const Frame& frame, const PilotBook& pilots,
                                         const Codebook& cb, const Eigen::MatrixXcd& phi,
                                         const SymbolBeliefs& beliefs, const Eigen::MatrixXd& gain_power);

ChannelPosterior channel_message(const Frame& frame, const PilotBook& pilots, const Codebook& cb,
                                 const Eigen::MatrixXcd& phi, const SymbolBeliefs& beliefs,
                                 const Eigen::MatrixXd& gain_power, const Eigen::VectorXd& precision);

/// lambda = (a + 1) / (b + E|h|^2) per tap.
Eigen::VectorXd precision_update(const Eigen::VectorXd& second_moments, const SparsePrior& prior);

struct ActivityEstimate {
    std::vector<double> scores;  // estimated channel energy per user
    std::vector<bool> active;
};

std::vector<bool> activity_detect(std::span<const double> scores, double noise_var, double gamma);

struct JointConfig {
    SparsePrior prior;
    bool sparse_prior = true;  // false keeps the tap precision at 0
    int max_outer_iters = 10;
    double damping = 0.5;
    double tol = 1e-5;
    double gamma = 0.2;
    double prior_active = 0.5;
    int mpa_iters = 10;
    int L = 1;
};

struct JointState {
    ChannelPosterior channel;
    Eigen::VectorXd precision;                               // per tap
    std::vector<std::vector<std::vector<double>>> data_post;  // [user][slot][M + 1]
    std::vector<std::vector<std::vector<GaussianMsg>>> u;     // [slot][subcarrier][row position]
    std::vector<double> activity_prob;  // packet-level P(active) per user
    std::vector<double> scores;         // activity_prob * E|h|^2
    int outer_iterations = 0;
};

struct ReceiverOutput {
    ActivityEstimate activity;
    Eigen::MatrixXcd gains;            // K x J estimate used for detection
    std::vector<DecodeResult> slots;   // per data slot
};

struct JointOutput {
    JointState state;
    ReceiverOutput rx;
};

JointOutput joint_decode(const Frame& frame, const PilotBook& pilots, const Codebook& cb,
                         const JointConfig& cfg);

/// Least squares over pilot slots, thresholded activity, then max-log MPA.
ReceiverOutput pilot_only_decode(const Frame& frame, const PilotBook& pilots, const Codebook& cb,
                                 const JointConfig& cfg);

/// Max-log MPA with the true gains and activity.
ReceiverOutput genie_decode(const Frame& frame, const Eigen::MatrixXcd& gains,
                            const std::vector<bool>& active, const Codebook& cb, int mpa_iters);

/// Max-log MPA on every data slot; users outside `active` get zero gain.
std::vector<DecodeResult> decode_data_slots(const Frame& frame, const Codebook& cb,
                                            const Eigen::MatrixXcd& gains,
                                            const std::vector<bool>& active, int mpa_iters);

struct Packet {
    Frame frame;
    ChannelRealization channel;
    std::vector<bool> active;
    std::vector<std::vector<int>> symbols;  // [user][data slot]
    std::vector<std::vector<int>> bits;     // [user], packet_bits each
};

/// One uplink packet. Inactive users send nothing in pilot or data slots.
Packet make_packet(const Codebook& cb, const PilotBook& pilots, int L, int packet_bits,
                   double p_active, double noise_var, Rng& rng);

}  // namespace scma
