#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "scma/types.hpp"

namespace scma {

std::uint64_t binomial(int n, int k);

/// Binary subcarrier-by-user incidence structure. Indices are 0-based.
struct FactorGraph {
    int K = 0;  // subcarriers
    int N = 0;  // nonzero entries per codeword
    int J = 0;  // users
    std::vector<std::vector<int>> supports;  // per user, ascending subcarriers
    std::vector<std::vector<int>> rows;      // per subcarrier, ascending users

    /// Validates column weight, distinctness and capacity, then derives rows.
    static FactorGraph from_supports(int K, std::vector<std::vector<int>> supports);

    bool occupies(int k, int j) const;
    int row_weight(int k) const { return static_cast<int>(rows[k].size()); }
    int max_row_weight() const;
    /// Position of subcarrier k inside supports[j], or -1.
    int support_position(int j, int k) const;
};

/// All N-subsets of {0..K-1} in lexicographic order.
std::vector<std::vector<int>> enumerate_supports(int K, int N);

/// First J lexicographic supports.
FactorGraph build_factor_graph(int K, int N, int J);

struct MotherConstellation {
    int N = 0;
    int M = 0;
    std::vector<CVec> points;  // M points of length N
    double rotation_angle = 0.0;
};

struct ConstellationOperator {
    double phase = 0.0;
    bool conjugate = false;
    std::vector<int> dim_permutation;  // out[d] = in[dim_permutation[d]]
};

ConstellationOperator identity_operator(int N);

/// Star-QAM base points, bit-reversal dimension pairing, pairwise Givens
/// rotation by `rotation_angle`, unit average energy.
MotherConstellation build_star_qam_mother(int N, int M, std::span<const double> ring_radii,
                                          double rotation_angle);

using MotherBuilder = std::function<MotherConstellation(double)>;

/// Grid angle maximizing the minimum product distance; ties go to the
/// smallest angle.
double optimize_rotation(const MotherBuilder& builder, std::span<const double> angle_grid);

/// Default mother: one ring for M <= 4, otherwise two rings with the outer
/// radius and the rotation both picked by product-distance grid search.
MotherConstellation default_star_qam_mother(int N, int M);

MotherConstellation apply_operator(const MotherConstellation& mother,
                                   const ConstellationOperator& op);

/// Phase (j * pi / (2J)) for user j, no conjugation, identity permutation.
std::vector<ConstellationOperator> default_operators(int J, int N);

enum class Labeling { natural, gray };

struct Codebook {
    FactorGraph fg;
    int M = 0;
    std::vector<std::vector<CVec>> words;  // [user][point] -> K entries
    std::vector<unsigned> labels;          // bit label of each point index

    int bits_per_symbol() const;
    /// Point index carrying the given label.
    int point_for_label(unsigned label) const;
    const cplx& at(int j, int m, int k) const { return words[j][m][k]; }
};

Codebook assemble_codebook(const FactorGraph& fg, const MotherConstellation& mother,
                           std::span<const ConstellationOperator> ops,
                           Labeling labeling = Labeling::natural);

/// Default star-QAM construction with per-user phase offsets.
Codebook build_star_qam_codebook(const FactorGraph& fg, int M,
                                 Labeling labeling = Labeling::natural);

/// Four-point codebook whose dimensions each take only m = 3 values.
Codebook build_low_projection_codebook(const FactorGraph& fg, int M, int m);

/// Throws FormatError when any codebook invariant is violated.
void validate_codebook(const Codebook& cb);

struct CodebookMetrics {
    double min_euclidean = 0.0;
    double min_product_distance = 0.0;
    double papr = 0.0;
};

double min_euclidean_distance(std::span<const CVec> points);
/// Product of |x_i - y_i| over the dimensions where x and y differ.
double product_distance(const CVec& x, const CVec& y);
double min_product_distance(std::span<const CVec> points);

CodebookMetrics codebook_metrics(const Codebook& cb);

/// Per (user, support position): the distinct codeword values and the
/// value index of every point.
struct ProjectionTable {
    std::vector<std::vector<CVec>> values;              // [j][n] -> distinct values
    std::vector<std::vector<std::vector<int>>> group;   // [j][n][m] -> value index

    int count(int j, int n) const { return static_cast<int>(values[j][n].size()); }
};

ProjectionTable build_projection_table(const Codebook& cb);

void write_codebook(std::ostream& os, const Codebook& cb);
Codebook read_codebook(std::istream& is);

}  // namespace scma
