#pragma once

// Flooding message-passing engine shared by the MPA family of detectors.

#include <vector>

#include "scma/decoders.hpp"
#include "scma/fn_kernel.hpp"

namespace scma::detail {

/// Function node k: the users it still couples and its hypothesis table.
struct NodeTable {
    std::vector<int> users;
    HypothesisTable table;
};

/// Label-level contributions h * x of every user on row k, plus identity groups.
struct RowContributions {
    std::vector<int> users;
    std::vector<CVec> values;
    std::vector<std::vector<int>> group;
};

/// Row k contributions; with `projection` the alternatives are the distinct
/// per-dimension values instead of labels.
RowContributions row_contributions(const Codebook& cb, const Eigen::MatrixXcd& gains, int k,
                                   const std::vector<int>& users,
                                   const ProjectionTable* projection);

std::vector<NodeTable> full_tables(const Codebook& cb, const Received& rx,
                                   const ProjectionTable* projection = nullptr);

class MessagePassing {
public:
    MessagePassing(const Codebook& cb, FnMode mode);

    void set_tables(std::vector<NodeTable> tables);
    const std::vector<NodeTable>& tables() const { return tables_; }

    /// One flooding iteration; returns the max change of any posterior
    /// probability of a user that is still being decoded.
    double iterate();

    /// Freezes user j (excluded from further updates).
    void fix(int j) { fixed_[j] = true; }
    bool fixed(int j) const { return fixed_[j]; }

    const std::vector<std::vector<double>>& posteriors() const { return prob_; }
    long hypotheses() const { return hypotheses_; }

private:
    std::vector<double>& fn_to_vn(int k, int j) { return fn_to_vn_[k * J_ + j]; }
    std::vector<double>& vn_to_fn(int k, int j) { return vn_to_fn_[k * J_ + j]; }

    const Codebook& cb_;
    FnMode mode_;
    int K_, J_, M_;
    std::vector<NodeTable> tables_;
    std::vector<std::vector<double>> fn_to_vn_;
    std::vector<std::vector<double>> vn_to_fn_;
    std::vector<std::vector<double>> prob_;
    std::vector<bool> fixed_;
    long hypotheses_ = 0;
};

/// Fills symbols and hard bits from posteriors (ties to the lowest index).
void finalize(const Codebook& cb, DecodeResult& result);

}  // namespace scma::detail
