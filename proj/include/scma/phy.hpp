#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "scma/codebook.hpp"
#include "scma/types.hpp"

namespace scma {

using Rng = std::mt19937_64;

/// splitmix64 finalizer over (master, index); the per-trial stream seed.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

inline Rng trial_rng(std::uint64_t master, std::uint64_t index) { return Rng(mix_seed(master, index)); }

/// Circular complex Gaussian with total variance `var`.
cplx complex_normal(Rng& rng, double var);

enum class ChannelModel { awgn, rayleigh_iid, tapped_delay };

struct ChannelRealization {
    ChannelModel model = ChannelModel::awgn;
    Eigen::MatrixXcd gains;                 // K x J
    std::vector<Eigen::VectorXcd> lag_taps;  // per user, length L (tapped_delay only)
};

/// Unnormalized lag-to-frequency matrix, Phi[n][l] = exp(-i 2 pi n l / K).
Eigen::MatrixXcd dft_matrix(int K, int L);

ChannelRealization make_channel(ChannelModel model, int K, int J, int L, Rng& rng);

/// Bits are MSB first; returns the point index carrying that label.
int symbol_for_bits(std::span<const int> bits, const Codebook& cb);
std::vector<int> bits_for_symbol(int symbol, const Codebook& cb);

CVec encode(std::span<const int> bits, const Codebook& cb, int user);

/// y_k = sum_j gains(k, j) x_{k,j} + n_k.
CVec superimpose(std::span<const CVec> codewords, const ChannelRealization& ch, double noise_var,
                 Rng& rng);

/// Unit codeword energy and log2(M) bits per codeword.
double calibrate_noise(double ebn0_db, const Codebook& cb);

struct PilotBook {
    int slots = 0;
    std::vector<std::vector<CVec>> symbols;  // [user][slot] -> one symbol per support position
};

/// QPSK sequences, distinct per user. When pilot_slots is a power of two
/// and at least J they are also mutually orthogonal.
PilotBook make_pilots(int J, const std::vector<std::vector<int>>& supports, int pilot_slots,
                      std::uint64_t seed);

struct Frame {
    int pilot_slots = 0;
    int data_slots = 0;
    std::vector<CVec> received;  // per slot (pilots first), K entries
    double noise_var = 0.0;
};

/// Pilot symbols are sent with amplitude 1/sqrt(N) so a pilot slot carries
/// the same energy as a unit-energy codeword.
double pilot_amplitude(const FactorGraph& fg);

/// Transmit vector of user j in pilot slot t.
CVec pilot_word(const PilotBook& pilots, const FactorGraph& fg, int j, int t);

}  // namespace scma
