#include "scma/phy.hpp"

#include <bit>
#include <cmath>
#include <set>

#include "scma/errors.hpp"

namespace scma {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

cplx complex_normal(Rng& rng, double var) {
    std::normal_distribution<double> dist(0.0, std::sqrt(var / 2.0));
    const double re = dist(rng);
    const double im = dist(rng);
    return {re, im};
}

Eigen::MatrixXcd dft_matrix(int K, int L) {
    Eigen::MatrixXcd phi(K, L);
    for (int n = 0; n < K; ++n) {
        for (int l = 0; l < L; ++l) {
            phi(n, l) = std::polar(1.0, -2.0 * kPi * n * l / K);
        }
    }
    return phi;
}

ChannelRealization make_channel(ChannelModel model, int K, int J, int L, Rng& rng) {
    ChannelRealization ch;
    ch.model = model;
    ch.gains = Eigen::MatrixXcd::Ones(K, J);
    switch (model) {
        case ChannelModel::awgn:
            break;
        case ChannelModel::rayleigh_iid:
            for (int j = 0; j < J; ++j) {
                for (int k = 0; k < K; ++k) ch.gains(k, j) = complex_normal(rng, 1.0);
            }
            break;
        case ChannelModel::tapped_delay: {
            if (L < 1 || L > K) throw ParameterError("tapped-delay channel needs 1 <= L <= K");
            const auto phi = dft_matrix(K, L);
            ch.lag_taps.resize(J);
            for (int j = 0; j < J; ++j) {
                Eigen::VectorXcd taps(L);
                for (int l = 0; l < L; ++l) taps(l) = complex_normal(rng, 1.0 / L);
                ch.gains.col(j) = phi * taps;
                ch.lag_taps[j] = std::move(taps);
            }
            break;
        }
    }
    return ch;
}

int symbol_for_bits(std::span<const int> bits, const Codebook& cb) {
    if (static_cast<int>(bits.size()) != cb.bits_per_symbol()) {
        throw ParameterError("bit vector length must equal log2(M)");
    }
    unsigned label = 0;
    for (int b : bits) label = (label << 1) | (b ? 1u : 0u);
    return cb.point_for_label(label);
}

std::vector<int> bits_for_symbol(int symbol, const Codebook& cb) {
    const int nb = cb.bits_per_symbol();
    std::vector<int> bits(nb);
    const unsigned label = cb.labels[symbol];
    for (int b = 0; b < nb; ++b) bits[b] = static_cast<int>((label >> (nb - 1 - b)) & 1u);
    return bits;
}

CVec encode(std::span<const int> bits, const Codebook& cb, int user) {
    return cb.words.at(user)[symbol_for_bits(bits, cb)];
}

CVec superimpose(std::span<const CVec> codewords, const ChannelRealization& ch, double noise_var,
                 Rng& rng) {
    const auto K = static_cast<int>(ch.gains.rows());
    const auto J = static_cast<int>(ch.gains.cols());
    if (static_cast<int>(codewords.size()) != J) throw DimensionError("one codeword per user required");
    CVec y(K);
    for (int j = 0; j < J; ++j) {
        if (static_cast<int>(codewords[j].size()) != K) throw DimensionError("codeword length != K");
        for (int k = 0; k < K; ++k) y[k] += ch.gains(k, j) * codewords[j][k];
    }
    for (int k = 0; k < K; ++k) y[k] += complex_normal(rng, noise_var);
    return y;
}

double calibrate_noise(double ebn0_db, const Codebook& cb) {
    return 1.0 / (cb.bits_per_symbol() * std::pow(10.0, ebn0_db / 10.0));
}

PilotBook make_pilots(int J, const std::vector<std::vector<int>>& supports, int pilot_slots,
                      std::uint64_t seed) {
    if (pilot_slots < 1) throw ParameterError("pilot_slots must be >= 1");
    if (static_cast<int>(supports.size()) != J) throw DimensionError("one support per user required");
    static const cplx qpsk[4] = {{M_SQRT1_2, M_SQRT1_2},
                                 {-M_SQRT1_2, M_SQRT1_2},
                                 {-M_SQRT1_2, -M_SQRT1_2},
                                 {M_SQRT1_2, -M_SQRT1_2}};
    PilotBook book;
    book.slots = pilot_slots;
    book.symbols.resize(J);
    if (pilot_slots >= J && std::has_single_bit(static_cast<unsigned>(pilot_slots))) {
        // Walsh rows under a common random QPSK scramble: still QPSK, and
        // mutually orthogonal, so the LS noise per user is noise_var / slots
        Rng rng(mix_seed(seed, 0));
        std::uniform_int_distribution<int> pick(0, 3);
        std::vector<int> scramble(pilot_slots);
        for (auto& c : scramble) c = pick(rng);
        for (int j = 0; j < J; ++j) {
            book.symbols[j].assign(pilot_slots, CVec(supports[j].size()));
            for (int t = 0; t < pilot_slots; ++t) {
                const int sign = std::popcount(static_cast<unsigned>(j & t)) % 2;
                for (auto& v : book.symbols[j][t]) v = qpsk[(scramble[t] + 2 * sign) % 4];
            }
        }
        return book;
    }
    std::set<std::vector<int>> used;
    for (int j = 0; j < J; ++j) {
        const auto width = supports[j].size();
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(j) + attempt * (1ULL << 32)));
            std::uniform_int_distribution<int> pick(0, 3);
            std::vector<int> idx(pilot_slots * width);
            for (auto& v : idx) v = pick(rng);
            if (!used.insert(idx).second) continue;
            book.symbols[j].assign(pilot_slots, CVec(width));
            for (int t = 0; t < pilot_slots; ++t) {
                for (std::size_t n = 0; n < width; ++n) book.symbols[j][t][n] = qpsk[idx[t * width + n]];
            }
            break;
        }
    }
    return book;
}

double pilot_amplitude(const FactorGraph& fg) { return 1.0 / std::sqrt(static_cast<double>(fg.N)); }

CVec pilot_word(const PilotBook& pilots, const FactorGraph& fg, int j, int t) {
    CVec x(fg.K);
    const double a = pilot_amplitude(fg);
    for (int n = 0; n < fg.N; ++n) x[fg.supports[j][n]] = a * pilots.symbols[j][t][n];
    return x;
}

}  // namespace scma
