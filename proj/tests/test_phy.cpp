#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "scma/errors.hpp"
#include "scma/phy.hpp"

using namespace scma;

namespace {

Codebook default_book(int M = 4) { return build_star_qam_codebook(build_factor_graph(4, 2, 6), M); }

}  // namespace

TEST_CASE("encode maps labels to codewords") {
    const auto cb = default_book();
    const std::vector<int> zero{0, 0};
    CHECK(encode(zero, cb, 3) == cb.words[3][0]);

    const auto lp = build_low_projection_codebook(build_factor_graph(4, 2, 6), 4, 3);
    const std::vector<int> ones{1, 1};
    const auto w = encode(ones, lp, 0);  // support {0, 1}, user phase 0
    CHECK(w[0] == cplx(1.0, 0.0));
    CHECK(std::abs(w[1]) < 1e-15);
    CHECK(w[2] == cplx{});
    CHECK(w[3] == cplx{});

    const auto gray = build_star_qam_codebook(build_factor_graph(4, 2, 6), 16, Labeling::gray);
    for (int m = 0; m < 16; ++m) {
        const auto bits = bits_for_symbol(m, gray);
        CHECK(symbol_for_bits(bits, gray) == m);
    }
    const std::vector<int> three{0, 1, 1};
    CHECK_THROWS_AS(encode(three, cb, 0), ParameterError);
}

TEST_CASE("superimpose") {
    const auto cb = default_book();
    Rng rng(5);
    const auto awgn = make_channel(ChannelModel::awgn, 4, 6, 1, rng);
    std::vector<CVec> words(6, CVec(4));
    words[2] = cb.words[2][1];
    const auto y = superimpose(words, awgn, 1e-30, rng);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(y[k] - words[2][k]) < 1e-12);

    // users 0 ({0,1}) and 5 ({2,3}) are disjoint
    std::vector<CVec> pair(6, CVec(4));
    pair[0] = cb.words[0][2];
    pair[5] = cb.words[5][3];
    const auto yp = superimpose(pair, awgn, 1e-30, rng);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(yp[k] - pair[0][k]) < 1e-12);
    for (int k = 2; k < 4; ++k) CHECK(std::abs(yp[k] - pair[5][k]) < 1e-12);

    // recorded with libstdc++'s normal_distribution
    Rng fixed(mix_seed(2024, 0));
    const auto ch = make_channel(ChannelModel::rayleigh_iid, 4, 6, 1, fixed);
    std::vector<CVec> w(6);
    for (int j = 0; j < 6; ++j) w[j] = cb.words[j][j % 4];
    const auto yr = superimpose(w, ch, 0.1, fixed);
    const CVec want = {{0x1.1b2f37d04c294p-3, 0x1.0ad07a0718121p-3},
                       {0x1.01c93ce8c6d95p+0, -0x1.66a9e84d0edc8p-1},
                       {0x1.ee5f57ad4e3d2p-1, 0x1.af3e522e0e41ep-2},
                       {-0x1.1526b930d5afcp+1, 0x1.5ed4fcffe09dep+0}};
    CHECK(yr == want);
}

TEST_CASE("sparsity pass-through") {
    const auto cb = default_book();
    Rng rng(9);
    const auto ch = make_channel(ChannelModel::rayleigh_iid, 4, 6, 1, rng);
    std::vector<CVec> words(6, CVec(4));
    words[0] = cb.words[0][1];  // only subcarriers 0 and 1 carry energy
    const auto y = superimpose(words, ch, 0.0, rng);
    CHECK(y[2] == cplx{});
    CHECK(y[3] == cplx{});
}

TEST_CASE("noise variance") {
    Rng rng(17);
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::norm(complex_normal(rng, 0.3));
    CHECK(std::abs(s / n - 0.3) < 0.02 * 0.3);
}

TEST_CASE("channel models") {
    Rng rng(21);
    const auto flat = make_channel(ChannelModel::tapped_delay, 4, 6, 1, rng);
    for (int j = 0; j < 6; ++j) {
        for (int k = 1; k < 4; ++k) CHECK(std::abs(flat.gains(k, j) - flat.gains(0, j)) < 1e-15);
    }

    const auto phi = dft_matrix(4, 4);
    const Eigen::MatrixXcd gram = phi.adjoint() * phi;
    CHECK((gram - 4.0 * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    for (int L = 1; L <= 4; ++L) {
        const auto ch = make_channel(ChannelModel::tapped_delay, 4, 6, L, rng);
        const auto p = dft_matrix(4, L);
        for (int j = 0; j < 6; ++j) CHECK((p * ch.lag_taps[j] - ch.gains.col(j)).cwiseAbs().maxCoeff() < 1e-12);
    }

    double power = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        const auto ch = make_channel(ChannelModel::tapped_delay, 4, 1, 3, rng);
        power += ch.gains.col(0).squaredNorm() / 4;
    }
    CHECK(power / trials == doctest::Approx(1.0).epsilon(0.03));

    const auto awgn = make_channel(ChannelModel::awgn, 4, 6, 1, rng);
    CHECK(awgn.gains == Eigen::MatrixXcd::Ones(4, 6));
    CHECK_THROWS_AS(make_channel(ChannelModel::tapped_delay, 4, 6, 5, rng), ParameterError);
}

TEST_CASE("calibrate_noise") {
    CHECK(calibrate_noise(0.0, default_book(4)) == doctest::Approx(0.5));
    CHECK(calibrate_noise(10.0, default_book(16)) == doctest::Approx(1.0 / 40));
    const auto cb = default_book();
    double prev = calibrate_noise(-5.0, cb);
    for (double snr = -4.0; snr <= 30.0; snr += 1.0) {
        const double nv = calibrate_noise(snr, cb);
        CHECK(nv < prev);
        prev = nv;
    }
}

TEST_CASE("pilot book") {
    const auto fg = build_factor_graph(4, 2, 6);
    for (int slots : {8, 5}) {
        const auto book = make_pilots(6, fg.supports, slots, 7);
        std::set<std::vector<std::pair<double, double>>> seqs;
        for (int j = 0; j < 6; ++j) {
            std::vector<std::pair<double, double>> flat;
            for (int t = 0; t < slots; ++t) {
                for (const auto& p : book.symbols[j][t]) {
                    CHECK(std::abs(p) == doctest::Approx(1.0).epsilon(1e-15));
                    flat.emplace_back(p.real(), p.imag());
                }
            }
            seqs.insert(flat);
        }
        CHECK(seqs.size() == 6);
        const auto again = make_pilots(6, fg.supports, slots, 7);
        CHECK(again.symbols == book.symbols);
    }

    // eight slots: users sharing a subcarrier are orthogonal
    const auto book = make_pilots(6, fg.supports, 8, 7);
    for (int k = 0; k < 4; ++k) {
        for (int a : fg.rows[k]) {
            for (int b : fg.rows[k]) {
                if (a == b) continue;
                cplx dot{};
                for (int t = 0; t < 8; ++t) {
                    dot += std::conj(pilot_word(book, fg, a, t)[k]) * pilot_word(book, fg, b, t)[k];
                }
                CHECK(std::abs(dot) < 1e-12);
            }
        }
    }
    // a pilot slot carries unit energy, like a codeword
    const auto w = pilot_word(book, fg, 4, 3);
    double e = 0.0;
    for (const auto& v : w) e += std::norm(v);
    CHECK(e == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_pilots(6, fg.supports, 0, 7), ParameterError);
}

TEST_CASE("trial streams are pure functions of (seed, index)") {
    CHECK(mix_seed(1, 0) == 10451216379200822465ULL);
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    auto a = trial_rng(42, 7);
    auto b = trial_rng(42, 7);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
}
