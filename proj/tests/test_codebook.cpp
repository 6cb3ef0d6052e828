#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "scma/codebook.hpp"
#include "scma/errors.hpp"
#include "scma/phy.hpp"

using namespace scma;

namespace {

std::vector<double> pairwise_distances(const std::vector<CVec>& pts) {
    std::vector<double> d;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < pts[a].size(); ++i) s += std::norm(pts[a][i] - pts[b][i]);
            d.push_back(std::sqrt(s));
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

// independent O(M^2) scan, deliberately not sharing code with the library
double scan_min_product(const std::vector<CVec>& pts) {
    double best = INFINITY;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = 0; b < pts.size(); ++b) {
            if (a == b) continue;
            double p = 1.0;
            for (std::size_t i = 0; i < pts[a].size(); ++i) {
                const double d = std::abs(pts[a][i] - pts[b][i]);
                if (d > 1e-12) p *= d;
            }
            best = std::min(best, p);
        }
    }
    return best;
}

std::vector<int> column_weights(const FactorGraph& fg) {
    std::vector<int> w(fg.J, 0);
    for (int k = 0; k < fg.K; ++k) {
        for (int j = 0; j < fg.J; ++j) w[j] += fg.occupies(k, j);
    }
    return w;
}

}  // namespace

TEST_CASE("enumerate_supports lists N-subsets lexicographically") {
    const auto s = enumerate_supports(4, 2);
    const std::vector<std::vector<int>> want = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    CHECK(s == want);
    CHECK(enumerate_supports(3, 3) == std::vector<std::vector<int>>{{0, 1, 2}});

    const auto big = enumerate_supports(6, 2);
    REQUIRE(big.size() == 15);
    CHECK(big.front() == std::vector<int>{0, 1});
    CHECK(big.back() == std::vector<int>{4, 5});
    // brute force: every 2-subset of 6 appears once, in order
    std::vector<std::vector<int>> brute;
    for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) brute.push_back({a, b});
    }
    CHECK(big == brute);

    CHECK_THROWS_AS(enumerate_supports(3, 4), ParameterError);
    CHECK_THROWS_AS(enumerate_supports(3, 0), ParameterError);
}

TEST_CASE("build_factor_graph structure") {
    const auto fg = build_factor_graph(4, 2, 6);
    CHECK(column_weights(fg) == std::vector<int>(6, 2));
    for (int k = 0; k < 4; ++k) CHECK(fg.row_weight(k) == 3);
    std::set<std::vector<int>> cols(fg.supports.begin(), fg.supports.end());
    CHECK(cols.size() == 6);

    const auto one = build_factor_graph(4, 2, 1);
    CHECK(one.supports == std::vector<std::vector<int>>{{0, 1}});
    for (int k = 0; k < 4; ++k) CHECK(one.row_weight(k) <= 1);

    const auto reg = build_factor_graph(6, 2, 15);
    for (int k = 0; k < 6; ++k) CHECK(reg.row_weight(k) == 5);

    CHECK_THROWS_AS(build_factor_graph(4, 2, 7), CapacityError);
    CHECK_THROWS_AS(FactorGraph::from_supports(4, {{0, 1}, {0, 1}}), ParameterError);
}

TEST_CASE("full support sets give regular rows") {
    for (int K = 2; K <= 7; ++K) {
        for (int N = 1; N <= K; ++N) {
            const auto J = static_cast<int>(binomial(K, N));
            const auto fg = build_factor_graph(K, N, J);
            for (int k = 0; k < K; ++k) CHECK(fg.row_weight(k) * K == N * J);
        }
    }
}

TEST_CASE("star-QAM mother constellation") {
    const std::vector<double> one{1.0};
    const auto qpsk = build_star_qam_mother(2, 4, one, 0.0);
    for (int m = 0; m < 4; ++m) {
        const cplx want = std::polar(M_SQRT1_2, 2.0 * kPi * m / 4);
        CHECK(std::abs(qpsk.points[m][0] - want) < 1e-12);
        CHECK(std::abs(qpsk.points[m][1]) == doctest::Approx(M_SQRT1_2));
    }

    const std::vector<double> two{1.0, 1.8};
    const auto sq16 = build_star_qam_mother(2, 16, two, 0.0);
    for (int d = 0; d < 2; ++d) {
        std::map<long, int> per_radius;
        for (const auto& p : sq16.points) per_radius[std::lround(std::abs(p[d]) * 1e6)]++;
        REQUIRE(per_radius.size() == 2);
        for (const auto& [r, count] : per_radius) CHECK(count == 8);
    }
    double energy = 0.0;
    for (const auto& p : sq16.points) {
        for (const auto& v : p) energy += std::norm(v);
    }
    CHECK(energy / 16 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(min_product_distance(build_star_qam_mother(2, 4, one, kPi / 4).points) >
          min_product_distance(qpsk.points));

    const std::vector<double> bad{1.0, 1.0};
    CHECK_THROWS_AS(build_star_qam_mother(2, 16, bad, 0.0), ParameterError);
    const std::vector<double> three{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(build_star_qam_mother(2, 16, three, 0.0), ParameterError);
}

TEST_CASE("optimize_rotation picks the rescanned maximum") {
    const std::vector<double> one{1.0};
    const MotherBuilder builder = [&](double a) { return build_star_qam_mother(2, 4, one, a); };
    const std::vector<double> single{0.0};
    CHECK(optimize_rotation(builder, single) == 0.0);

    std::vector<double> grid;
    for (int i = 0; i < 158; ++i) grid.push_back(0.01 * i);
    const double got = optimize_rotation(builder, grid);
    double best = -1.0;
    double arg = 0.0;
    for (double a : grid) {
        const double v = scan_min_product(builder(a).points);
        if (v > best + 1e-12) {
            best = v;
            arg = a;
        }
    }
    CHECK(got == arg);

    // a builder that ignores the angle: every grid point ties
    const MotherBuilder flat = [&](double) { return build_star_qam_mother(2, 4, one, 0.3); };
    const std::vector<double> ties{0.5, 0.2, 0.9};
    CHECK(optimize_rotation(flat, ties) == 0.2);
}

TEST_CASE("apply_operator is an isometry") {
    const std::vector<double> one{1.0};
    const auto mother = build_star_qam_mother(2, 4, one, 0.4);
    const auto id = apply_operator(mother, identity_operator(2));
    CHECK(id.points == mother.points);

    ConstellationOperator neg = identity_operator(2);
    neg.phase = kPi;
    const auto negated = apply_operator(mother, neg);
    for (int m = 0; m < 4; ++m) {
        for (int d = 0; d < 2; ++d) CHECK(std::abs(negated.points[m][d] + mother.points[m][d]) < 1e-12);
    }

    Rng rng(3);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
    for (int trial = 0; trial < 50; ++trial) {
        MotherConstellation c;
        c.N = 2;
        c.M = 4;
        c.points.assign(4, CVec(2));
        for (auto& p : c.points) {
            for (auto& v : p) v = complex_normal(rng, 1.0);
        }
        ConstellationOperator op;
        op.conjugate = coin(rng);
        op.phase = phase(rng);
        op.dim_permutation = coin(rng) ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
        const auto a = pairwise_distances(c.points);
        const auto b = pairwise_distances(apply_operator(c, op).points);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    }

    ConstellationOperator broken = identity_operator(2);
    broken.dim_permutation = {0, 0};
    CHECK_THROWS_AS(apply_operator(mother, broken), ParameterError);
}

TEST_CASE("assemble_codebook places points on the support") {
    const auto fg = FactorGraph::from_supports(4, {{0, 2}});
    MotherConstellation mc;
    mc.N = 2;
    mc.M = 2;
    mc.points = {{cplx(0.6, 0.0), cplx(0.0, 0.8)}, {cplx(-0.6, 0.0), cplx(0.0, -0.8)}};
    const std::vector<ConstellationOperator> ops{identity_operator(2)};
    const auto cb = assemble_codebook(fg, mc, ops);
    CHECK(cb.words[0][0] == CVec{cplx(0.6, 0.0), {}, cplx(0.0, 0.8), {}});

    const auto full = build_star_qam_codebook(build_factor_graph(4, 2, 6), 4);
    REQUIRE(full.words.size() == 6);
    std::vector<CVec> all;
    for (int j = 0; j < 6; ++j) {
        REQUIRE(full.words[j].size() == 4);
        double energy = 0.0;
        for (const auto& w : full.words[j]) {
            int nonzero = 0;
            for (int k = 0; k < 4; ++k) {
                const bool on = full.fg.occupies(k, j);
                if (w[k] != cplx{}) ++nonzero;
                if (!on) CHECK(w[k] == cplx{});
                if (on) CHECK(w[k] != cplx{});
                energy += std::norm(w[k]);
            }
            CHECK(nonzero == 2);
            all.push_back(w);
        }
        CHECK(energy / 4 == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(pairwise_distances(all).front() > 1e-6);
    CHECK_NOTHROW(validate_codebook(full));

    const std::vector<ConstellationOperator> too_few(5, identity_operator(2));
    CHECK_THROWS_AS(assemble_codebook(full.fg, default_star_qam_mother(2, 4), too_few), ParameterError);
}

TEST_CASE("low-projection codebook") {
    const auto fg = build_factor_graph(4, 2, 6);
    const auto cb = build_low_projection_codebook(fg, 4, 3);
    // user 0 has phase 0, so its first dimension is the raw mother
    std::vector<double> dim1;
    for (int m = 0; m < 4; ++m) dim1.push_back(cb.words[0][m][0].real());
    const double c = 1.0;
    CHECK(dim1[0] == doctest::Approx(-c));
    CHECK(dim1[1] == doctest::Approx(0.0));
    CHECK(dim1[2] == doctest::Approx(0.0));
    CHECK(dim1[3] == doctest::Approx(c));
    CHECK(cb.labels[1] == 0b01);
    CHECK(cb.labels[2] == 0b10);

    const auto proj = build_projection_table(cb);
    for (int j = 0; j < 6; ++j) {
        for (int n = 0; n < 2; ++n) CHECK(proj.count(j, n) == 3);
    }
    CHECK(codebook_metrics(cb).min_euclidean == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(build_low_projection_codebook(fg, 8, 3), ParameterError);
}

TEST_CASE("codebook metrics match an exhaustive scan") {
    const auto cb = build_star_qam_codebook(build_factor_graph(4, 2, 6), 16);
    const auto m = codebook_metrics(cb);
    double min_e = INFINITY;
    double min_p = INFINITY;
    double peak = 0.0;
    double mean = 0.0;
    int entries = 0;
    for (int j = 0; j < 6; ++j) {
        std::vector<CVec> pts;
        for (const auto& w : cb.words[j]) {
            CVec v;
            for (int k : cb.fg.supports[j]) {
                v.push_back(w[k]);
                peak = std::max(peak, std::norm(w[k]));
                mean += std::norm(w[k]);
                ++entries;
            }
            pts.push_back(v);
        }
        min_e = std::min(min_e, pairwise_distances(pts).front());
        min_p = std::min(min_p, scan_min_product(pts));
    }
    CHECK(m.min_euclidean == doctest::Approx(min_e).epsilon(1e-12));
    CHECK(m.min_product_distance == doctest::Approx(min_p).epsilon(1e-12));
    CHECK(m.papr == doctest::Approx(peak / (mean / entries)).epsilon(1e-12));
    CHECK(m.min_euclidean > 0.0);
}

TEST_CASE("codebook file round trip and rejection") {
    const auto cb = build_star_qam_codebook(build_factor_graph(4, 2, 6), 4);
    std::stringstream ss;
    write_codebook(ss, cb);
    const auto back = read_codebook(ss);
    REQUIRE(back.M == cb.M);
    CHECK(back.fg.supports == cb.fg.supports);
    for (int j = 0; j < 6; ++j) {
        for (int m = 0; m < 4; ++m) CHECK(back.words[j][m] == cb.words[j][m]);
    }

    std::stringstream bad("4 2 1 2\n1,0 0,0 0,0 0,0\n0,1 1,0 0,0 0,0\n");
    CHECK_THROWS_AS(read_codebook(bad), FormatError);
    std::stringstream truncated("4 2 1 2\n1,0 1,0 0,0 0,0\n");
    CHECK_THROWS_AS(read_codebook(truncated), FormatError);
    std::stringstream empty("");
    CHECK_THROWS_AS(read_codebook(empty), FormatError);
}
