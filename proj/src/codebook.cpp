#include "scma/codebook.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "scma/errors.hpp"

namespace scma {

namespace {

constexpr double kSameValueTol = 1e-12;

unsigned bit_reverse(unsigned v, int bits) {
    unsigned r = 0;
    for (int b = 0; b < bits; ++b) {
        r = (r << 1) | ((v >> b) & 1u);
    }
    return r;
}

bool is_power_of_two(int v) { return v > 0 && std::has_single_bit(static_cast<unsigned>(v)); }

void normalize_energy(std::vector<CVec>& points) {
    double energy = 0.0;
    for (const auto& p : points) {
        for (const auto& v : p) energy += std::norm(v);
    }
    energy /= static_cast<double>(points.size());
    const double scale = 1.0 / std::sqrt(energy);
    for (auto& p : points) {
        for (auto& v : p) v *= scale;
    }
}

double distance(const CVec& a, const CVec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::norm(a[i] - b[i]);
    return std::sqrt(d);
}

std::vector<unsigned> make_labels(int M, Labeling labeling) {
    std::vector<unsigned> labels(M);
    for (int m = 0; m < M; ++m) {
        const auto u = static_cast<unsigned>(m);
        labels[m] = labeling == Labeling::gray ? (u ^ (u >> 1)) : u;
    }
    return labels;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

// ---------------------------------------------------------------- factor graph

FactorGraph FactorGraph::from_supports(int K, std::vector<std::vector<int>> supports) {
    if (K < 1 || supports.empty()) throw ParameterError("factor graph needs K >= 1 and J >= 1");
    const int N = static_cast<int>(supports.front().size());
    if (N < 1 || N > K) throw ParameterError("support size must lie in [1, K]");
    std::set<std::vector<int>> seen;
    for (const auto& s : supports) {
        if (static_cast<int>(s.size()) != N) throw ParameterError("every user must occupy N subcarriers");
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] < 0 || s[i] >= K) throw ParameterError("support index out of range");
            if (i > 0 && s[i] <= s[i - 1]) throw ParameterError("support must be strictly ascending");
        }
        if (!seen.insert(s).second) throw ParameterError("factor graph columns must be distinct");
    }
    const int J = static_cast<int>(supports.size());
    if (static_cast<std::uint64_t>(J) > binomial(K, N)) {
        throw CapacityError("J exceeds binomial(K, N)");
    }
    FactorGraph fg;
    fg.K = K;
    fg.N = N;
    fg.J = J;
    fg.supports = std::move(supports);
    fg.rows.assign(K, {});
    for (int j = 0; j < J; ++j) {
        for (int k : fg.supports[j]) fg.rows[k].push_back(j);
    }
    return fg;
}

bool FactorGraph::occupies(int k, int j) const { return support_position(j, k) >= 0; }

int FactorGraph::max_row_weight() const {
    int w = 0;
    for (const auto& r : rows) w = std::max(w, static_cast<int>(r.size()));
    return w;
}

int FactorGraph::support_position(int j, int k) const {
    const auto& s = supports[j];
    for (int n = 0; n < static_cast<int>(s.size()); ++n) {
        if (s[n] == k) return n;
    }
    return -1;
}

std::vector<std::vector<int>> enumerate_supports(int K, int N) {
    if (N < 1 || N > K) throw ParameterError("enumerate_supports requires 1 <= N <= K");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(N);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = N - 1;
        while (i >= 0 && cur[i] == K - N + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int t = i + 1; t < N; ++t) cur[t] = cur[t - 1] + 1;
    }
    return out;
}

FactorGraph build_factor_graph(int K, int N, int J) {
    if (N < 1 || N > K) throw ParameterError("build_factor_graph requires 1 <= N <= K");
    if (J < 1) throw ParameterError("build_factor_graph requires J >= 1");
    if (static_cast<std::uint64_t>(J) > binomial(K, N)) {
        throw CapacityError("J = " + std::to_string(J) + " exceeds binomial(K, N)");
    }
    auto all = enumerate_supports(K, N);
    all.resize(J);
    return FactorGraph::from_supports(K, std::move(all));
}

// --------------------------------------------------------- mother constellation

MotherConstellation build_star_qam_mother(int N, int M, std::span<const double> ring_radii,
                                          double rotation_angle) {
    if (N < 1) throw ParameterError("mother constellation needs N >= 1");
    if (!is_power_of_two(M) || M < 2) throw ParameterError("M must be a power of two >= 2");
    if (ring_radii.empty()) throw ParameterError("at least one ring radius required");
    for (std::size_t r = 0; r < ring_radii.size(); ++r) {
        if (!(ring_radii[r] > 0.0)) throw ParameterError("ring radii must be positive");
        if (r > 0 && !(ring_radii[r] > ring_radii[r - 1])) {
            throw ParameterError("ring radii must be strictly increasing");
        }
    }
    const int rings = static_cast<int>(ring_radii.size());
    if (M % rings != 0) throw ParameterError("M must be divisible by the ring count");
    const int per_ring = M / rings;

    CVec base(M);
    for (int m = 0; m < M; ++m) {
        const int r = m / per_ring;
        const int p = m % per_ring;
        double phase = 2.0 * kPi * p / per_ring;
        if (r % 2 == 1) phase += kPi / per_ring;
        base[m] = std::polar(ring_radii[r], phase);
    }

    const int bits = std::countr_zero(static_cast<unsigned>(M));
    MotherConstellation mc;
    mc.N = N;
    mc.M = M;
    mc.rotation_angle = rotation_angle;
    mc.points.assign(M, CVec(N));
    for (int m = 0; m < M; ++m) {
        const auto rev = static_cast<int>(bit_reverse(static_cast<unsigned>(m), bits));
        for (int d = 0; d < N; ++d) {
            const int idx = ((d % 2 == 0 ? m : rev) + d / 2) % M;
            mc.points[m][d] = base[idx];
        }
    }
    const double c = std::cos(rotation_angle);
    const double s = std::sin(rotation_angle);
    for (auto& p : mc.points) {
        for (int d = 0; d + 1 < N; ++d) {
            const cplx a = p[d];
            const cplx b = p[d + 1];
            p[d] = c * a - s * b;
            p[d + 1] = s * a + c * b;
        }
    }
    normalize_energy(mc.points);
    return mc;
}

double optimize_rotation(const MotherBuilder& builder, std::span<const double> angle_grid) {
    if (angle_grid.empty()) throw ParameterError("optimize_rotation needs a non-empty grid");
    double best_angle = 0.0;
    double best_value = -1.0;
    for (double angle : angle_grid) {
        const double value = min_product_distance(builder(angle).points);
        const double tie_tol = 1e-12 * std::max(1.0, std::abs(best_value));
        if (value > best_value + tie_tol) {
            best_value = value;
            best_angle = angle;
        } else if (std::abs(value - best_value) <= tie_tol && angle < best_angle) {
            best_angle = angle;
        }
    }
    return best_angle;
}

namespace {

std::vector<double> default_angle_grid() {
    std::vector<double> grid;
    for (int i = 0; 0.01 * i < kPi / 2; ++i) grid.push_back(0.01 * i);
    return grid;
}

}  // namespace

MotherConstellation default_star_qam_mother(int N, int M) {
    const auto grid = default_angle_grid();
    if (M <= 4) {
        const std::vector<double> radii{1.0};
        const double angle = optimize_rotation(
            [&](double a) { return build_star_qam_mother(N, M, radii, a); }, grid);
        return build_star_qam_mother(N, M, radii, angle);
    }
    double best_value = -1.0;
    MotherConstellation best;
    for (int i = 0; i <= 18; ++i) {
        const std::vector<double> radii{1.0, 1.2 + 0.1 * i};
        const auto builder = [&](double a) { return build_star_qam_mother(N, M, radii, a); };
        auto mc = builder(optimize_rotation(builder, grid));
        const double value = min_product_distance(mc.points);
        if (value > best_value + 1e-12) {
            best_value = value;
            best = std::move(mc);
        }
    }
    return best;
}

ConstellationOperator identity_operator(int N) {
    ConstellationOperator op;
    op.dim_permutation.resize(N);
    std::iota(op.dim_permutation.begin(), op.dim_permutation.end(), 0);
    return op;
}

MotherConstellation apply_operator(const MotherConstellation& mother,
                                   const ConstellationOperator& op) {
    const int N = mother.N;
    std::vector<int> perm = op.dim_permutation;
    if (perm.empty()) perm = identity_operator(N).dim_permutation;
    if (static_cast<int>(perm.size()) != N) throw ParameterError("permutation length must equal N");
    std::vector<bool> hit(N, false);
    for (int p : perm) {
        if (p < 0 || p >= N || hit[p]) throw ParameterError("dim_permutation is not a bijection");
        hit[p] = true;
    }
    const cplx rot = std::polar(1.0, op.phase);
    MotherConstellation out = mother;
    for (int m = 0; m < mother.M; ++m) {
        for (int d = 0; d < N; ++d) {
            cplx v = mother.points[m][perm[d]];
            if (op.conjugate) v = std::conj(v);
            out.points[m][d] = rot * v;
        }
    }
    return out;
}

std::vector<ConstellationOperator> default_operators(int J, int N) {
    std::vector<ConstellationOperator> ops;
    ops.reserve(J);
    for (int j = 0; j < J; ++j) {
        auto op = identity_operator(N);
        op.phase = j * kPi / (2.0 * J);
        ops.push_back(std::move(op));
    }
    return ops;
}

// ------------------------------------------------------------------- codebook

int Codebook::bits_per_symbol() const { return std::countr_zero(static_cast<unsigned>(M)); }

int Codebook::point_for_label(unsigned label) const {
    for (int m = 0; m < M; ++m) {
        if (labels[m] == label) return m;
    }
    throw ParameterError("label out of range");
}

Codebook assemble_codebook(const FactorGraph& fg, const MotherConstellation& mother,
                           std::span<const ConstellationOperator> ops, Labeling labeling) {
    if (static_cast<int>(ops.size()) != fg.J) throw ParameterError("need one operator per user");
    if (mother.N != fg.N) throw ParameterError("mother dimension must equal the support size N");
    if (!is_power_of_two(mother.M)) throw ParameterError("M must be a power of two");

    Codebook cb;
    cb.fg = fg;
    cb.M = mother.M;
    cb.labels = make_labels(mother.M, labeling);
    cb.words.assign(fg.J, std::vector<CVec>(mother.M, CVec(fg.K)));
    for (int j = 0; j < fg.J; ++j) {
        const auto user = apply_operator(mother, ops[j]);
        std::vector<CVec> pts = user.points;
        normalize_energy(pts);
        for (int m = 0; m < mother.M; ++m) {
            for (int n = 0; n < fg.N; ++n) cb.words[j][m][fg.supports[j][n]] = pts[m][n];
        }
    }
    return cb;
}

Codebook build_star_qam_codebook(const FactorGraph& fg, int M, Labeling labeling) {
    const auto mother = default_star_qam_mother(fg.N, M);
    const auto ops = default_operators(fg.J, fg.N);
    return assemble_codebook(fg, mother, ops, labeling);
}

Codebook build_low_projection_codebook(const FactorGraph& fg, int M, int m) {
    if (M != 4 || m != 3) throw ParameterError("low-projection codebook supports only M = 4, m = 3");
    if (fg.N != 2) throw ParameterError("low-projection codebook needs N = 2");
    MotherConstellation mc;
    mc.N = 2;
    mc.M = 4;
    mc.points = {{-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}, {1.0, 0.0}};
    normalize_energy(mc.points);
    const auto ops = default_operators(fg.J, fg.N);
    return assemble_codebook(fg, mc, ops);
}

void validate_codebook(const Codebook& cb) {
    const auto& fg = cb.fg;
    if (cb.M < 2 || !is_power_of_two(cb.M)) throw FormatError("M must be a power of two >= 2");
    if (static_cast<int>(cb.words.size()) != fg.J) throw FormatError("user count mismatch");
    if (static_cast<int>(cb.labels.size()) != cb.M) throw FormatError("label table size mismatch");
    for (int j = 0; j < fg.J; ++j) {
        if (static_cast<int>(cb.words[j].size()) != cb.M) throw FormatError("point count mismatch");
        double energy = 0.0;
        for (int m = 0; m < cb.M; ++m) {
            const auto& w = cb.words[j][m];
            if (static_cast<int>(w.size()) != fg.K) throw FormatError("codeword length mismatch");
            int nonzero = 0;
            for (int k = 0; k < fg.K; ++k) {
                const bool on = fg.occupies(k, j);
                if (!on && w[k] != cplx{}) throw FormatError("nonzero entry outside the user's support");
                if (on && w[k] != cplx{}) ++nonzero;
                energy += std::norm(w[k]);
            }
            if (nonzero != fg.N) throw FormatError("codeword must have exactly N nonzero entries");
        }
        energy /= cb.M;
        if (std::abs(energy - 1.0) > 1e-9) throw FormatError("per-user average energy must be 1");
        for (int a = 0; a < cb.M; ++a) {
            for (int b = a + 1; b < cb.M; ++b) {
                if (distance(cb.words[j][a], cb.words[j][b]) <= kSameValueTol) {
                    throw FormatError("codewords of a user must be pairwise distinct");
                }
            }
        }
    }
}

// -------------------------------------------------------------------- metrics

double min_euclidean_distance(std::span<const CVec> points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            best = std::min(best, distance(points[a], points[b]));
        }
    }
    return best;
}

double product_distance(const CVec& x, const CVec& y) {
    double prod = 1.0;
    bool any = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::abs(x[i] - y[i]);
        if (d > kSameValueTol) {
            prod *= d;
            any = true;
        }
    }
    return any ? prod : 0.0;
}

double min_product_distance(std::span<const CVec> points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            best = std::min(best, product_distance(points[a], points[b]));
        }
    }
    return best;
}

CodebookMetrics codebook_metrics(const Codebook& cb) {
    CodebookMetrics out;
    out.min_euclidean = std::numeric_limits<double>::infinity();
    out.min_product_distance = std::numeric_limits<double>::infinity();
    for (int j = 0; j < cb.fg.J; ++j) {
        out.min_euclidean = std::min(out.min_euclidean, min_euclidean_distance(cb.words[j]));
        out.min_product_distance =
            std::min(out.min_product_distance, min_product_distance(cb.words[j]));
        for (int k : cb.fg.supports[j]) {
            double peak = 0.0;
            double mean = 0.0;
            for (int m = 0; m < cb.M; ++m) {
                const double p = std::norm(cb.words[j][m][k]);
                peak = std::max(peak, p);
                mean += p;
            }
            mean /= cb.M;
            if (mean > 0.0) out.papr = std::max(out.papr, peak / mean);
        }
    }
    return out;
}

ProjectionTable build_projection_table(const Codebook& cb) {
    const auto& fg = cb.fg;
    ProjectionTable t;
    t.values.assign(fg.J, {});
    t.group.assign(fg.J, {});
    for (int j = 0; j < fg.J; ++j) {
        t.values[j].assign(fg.N, {});
        t.group[j].assign(fg.N, std::vector<int>(cb.M, -1));
        for (int n = 0; n < fg.N; ++n) {
            const int k = fg.supports[j][n];
            auto& vals = t.values[j][n];
            for (int m = 0; m < cb.M; ++m) {
                const cplx v = cb.words[j][m][k];
                int idx = -1;
                for (int g = 0; g < static_cast<int>(vals.size()); ++g) {
                    if (std::abs(vals[g] - v) <= kSameValueTol) {
                        idx = g;
                        break;
                    }
                }
                if (idx < 0) {
                    idx = static_cast<int>(vals.size());
                    vals.push_back(v);
                }
                t.group[j][n][m] = idx;
            }
        }
    }
    return t;
}

}  // namespace scma
