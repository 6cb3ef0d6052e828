#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "scma/decoders.hpp"
#include "scma/errors.hpp"
#include "scma/phy.hpp"

using namespace scma;

namespace {

using Combo = std::vector<int>;

SubcarrierSearch random_problem(Rng& rng, int users, int M) {
    SubcarrierSearch p;
    p.y = complex_normal(rng, 3.0);
    for (int i = 0; i < users; ++i) {
        const cplx h = complex_normal(rng, 1.0);
        CVec v(M);
        for (auto& x : v) x = h * complex_normal(rng, 1.0);
        p.values.push_back(v);
        p.gain_abs.push_back(std::abs(h));
    }
    return p;
}

// every allowed combo with its metric, sorted by metric
std::vector<std::pair<double, Combo>> exhaustive(const SubcarrierSearch& p) {
    std::vector<std::pair<double, Combo>> all;
    const int d = static_cast<int>(p.values.size());
    Combo c(d, 0);
    while (true) {
        bool ok = true;
        cplx s{};
        for (int i = 0; i < d; ++i) {
            if (!p.allowed.empty() && !p.allowed[i][c[i]]) ok = false;
            s += p.values[i][c[i]];
        }
        if (ok) all.emplace_back(std::norm(p.y - s), c);
        int i = d - 1;
        while (i >= 0 && ++c[i] == static_cast<int>(p.values[i].size())) c[i--] = 0;
        if (i < 0) break;
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return all;
}

Received random_rx(const Codebook& cb, double nv, Rng& rng, std::vector<int>* tx = nullptr) {
    std::uniform_int_distribution<int> sym(0, cb.M - 1);
    const auto ch = make_channel(ChannelModel::rayleigh_iid, cb.fg.K, cb.fg.J, 1, rng);
    std::vector<CVec> words(cb.fg.J);
    std::vector<int> sent(cb.fg.J);
    for (int j = 0; j < cb.fg.J; ++j) {
        sent[j] = sym(rng);
        words[j] = cb.words[j][sent[j]];
    }
    if (tx) *tx = sent;
    return {superimpose(words, ch, nv, rng), ch.gains, nv};
}

Codebook system(int M) { return build_star_qam_codebook(build_factor_graph(4, 2, 6), M); }

}  // namespace

TEST_CASE("full list is the sorted enumeration") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const auto p = random_problem(rng, 3, 4);
        const auto list = lsd_subcarrier(p, 64);
        const auto all = exhaustive(p);
        REQUIRE(list.combos.size() == 64);
        for (std::size_t i = 0; i < 64; ++i) CHECK(list.metrics[i] == doctest::Approx(all[i].first).epsilon(1e-12));
        auto got = list.combos;
        std::vector<Combo> want;
        for (const auto& a : all) want.push_back(a.second);
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
        CHECK(list.visited_per_level == std::vector<long>{4, 16, 64});
    }
}

TEST_CASE("list of one is the exhaustive argmin") {
    Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        const auto p = random_problem(rng, 3, 16);
        const auto list = lsd_subcarrier(p, 1);
        const auto all = exhaustive(p);
        REQUIRE(list.combos.size() == 1);
        CHECK(list.metrics[0] == doctest::Approx(all[0].first).epsilon(1e-12));
        CHECK(list.combos[0] == all[0].second);
    }
}

TEST_CASE("allowed sets restrict the search space") {
    Rng rng(3);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int t = 0; t < 200; ++t) {
        auto p = random_problem(rng, 3, 4);
        p.allowed.assign(3, std::vector<bool>(4, true));
        p.allowed[t % 3][pick(rng)] = false;
        if (t % 2) p.allowed[(t + 1) % 3][pick(rng)] = false;
        const auto all = exhaustive(p);
        const int lambda = 1 + t % 12;
        const auto list = lsd_subcarrier(p, lambda);
        REQUIRE(list.combos.size() == std::min<std::size_t>(lambda, all.size()));
        for (std::size_t i = 0; i < list.combos.size(); ++i) {
            CHECK(list.metrics[i] == doctest::Approx(all[i].first).epsilon(1e-12));
            for (int u = 0; u < 3; ++u) CHECK(p.allowed[u][list.combos[i][u]]);
            if (i) CHECK(list.metrics[i] >= list.metrics[i - 1]);
        }
        // list completeness at the size of the allowed space
        CHECK(lsd_subcarrier(p, static_cast<int>(all.size())).combos.size() == all.size());
    }
    auto p = random_problem(rng, 2, 4);
    p.allowed = {std::vector<bool>(4, false), std::vector<bool>(4, true)};
    CHECK_THROWS_AS(lsd_subcarrier(p, 4), ParameterError);
    CHECK_THROWS_AS(lsd_subcarrier(random_problem(rng, 2, 4), 0), ParameterError);
}

TEST_CASE("full-list LSD-MPA equals max-log MPA") {
    const auto cb = system(4);
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        const auto rx = random_rx(cb, calibrate_noise(6.0, cb), rng);
        const auto ref = max_log_mpa(cb, rx, 10);
        const auto lsd = lsd_mpa(cb, rx, 64, 10);
        CHECK(lsd.symbols == ref.symbols);
        for (int k = 0; k < 4; ++k) CHECK(lsd.visited_nodes[k] == std::vector<long>{4, 16, 64});
    }
}

TEST_CASE("visited nodes are bounded by the full tree") {
    const auto cb = system(16);
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto rx = random_rx(cb, calibrate_noise(9.0, cb), rng);
        for (const auto& r : {lsd_mpa(cb, rx, 32, 10), np_lsd_mpa(cb, rx, 32, 1, 10)}) {
            for (int k = 0; k < 4; ++k) {
                CHECK(r.visited_nodes[k][0] <= 16);
                CHECK(r.visited_nodes[k][1] <= 256);
                CHECK(r.visited_nodes[k][2] <= 4096);
                CHECK(r.candidate_list_sizes[k] <= 32);
            }
        }
    }
}

// Only the averages are ordered. With symbols excluded, the Λ-th best allowed
// combo is worse than the unrestricted one, so the radius is looser and a
// single search can expand nodes the unrestricted search would have cut.
TEST_CASE("node pruning visits no more nodes on average") {
    const auto cb = system(16);
    Rng rng(6);
    for (double snr : {6.0, 12.0}) {
        std::vector<long> lsd(3, 0);
        std::vector<long> np(3, 0);
        const int trials = 300;
        for (int t = 0; t < trials; ++t) {
            const auto rx = random_rx(cb, calibrate_noise(snr, cb), rng);
            const auto a = lsd_mpa(cb, rx, 32, 10);
            const auto b = np_lsd_mpa(cb, rx, 32, 1, 10);
            for (int k = 0; k < 4; ++k) {
                for (int l = 0; l < 3; ++l) {
                    lsd[l] += a.visited_nodes[k][l];
                    np[l] += b.visited_nodes[k][l];
                }
            }
        }
        for (int l = 0; l < 3; ++l) CHECK(np[l] <= lsd[l]);
        CHECK(np[2] < lsd[2]);
    }
}

TEST_CASE("noiseless input keeps the true symbols") {
    const auto cb = system(16);
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        std::vector<int> tx;
        auto rx = random_rx(cb, 0.0, rng, &tx);
        rx.noise_var = 1e-6;
        CHECK(np_lsd_mpa(cb, rx, 8, 2, 10).symbols == tx);
        CHECK(lsd_mpa(cb, rx, 8, 10).symbols == tx);
    }
}

TEST_CASE("shorter lists cost BER") {
    const auto cb = system(16);
    Rng rng(8);
    const std::vector<int> sizes = {2, 8, 64};
    std::vector<long> errors(sizes.size(), 0);
    for (int t = 0; t < 400; ++t) {
        std::vector<int> tx;
        const auto rx = random_rx(cb, calibrate_noise(12.0, cb), rng, &tx);
        for (std::size_t s = 0; s < sizes.size(); ++s) {
            const auto r = lsd_mpa(cb, rx, sizes[s], 10);
            for (int j = 0; j < 6; ++j) {
                const auto want = bits_for_symbol(tx[j], cb);
                for (int b = 0; b < 4; ++b) errors[s] += r.hard_bits[j][b] != want[b];
            }
        }
    }
    CHECK(errors[0] > errors[1]);
    CHECK(errors[1] > errors[2]);
}

TEST_CASE("low projection shrinks the deepest level") {
    const auto lp = build_low_projection_codebook(build_factor_graph(4, 2, 6), 4, 3);
    Rng rng(9);
    long full = 0;
    long proj = 0;
    for (int t = 0; t < 300; ++t) {
        const auto rx = random_rx(lp, calibrate_noise(8.0, lp), rng);
        const auto a = lsd_mpa(lp, rx, 8, 10, false);
        const auto b = lsd_mpa(lp, rx, 8, 10, true);
        for (int k = 0; k < 4; ++k) {
            full += a.visited_nodes[k][2];
            proj += b.visited_nodes[k][2];
        }
    }
    CHECK(proj < full);
}
