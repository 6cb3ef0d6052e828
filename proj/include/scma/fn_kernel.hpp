#pragma once

#include <vector>

#include "scma/types.hpp"

namespace scma {

enum class FnMode { sum_product, max_log };

/// The hypotheses a function node marginalizes over.
///
/// Each colliding user i contributes one of `alternatives[i]` distinct
/// values; several labels may share an alternative (`group[i][m]`). For a
/// full kernel every label is its own alternative. A candidate-list table
/// holds only a subset of the product space; the missing hypotheses are
/// represented by the single log-likelihood `clamp_loglik`.
struct HypothesisTable {
    int users = 0;
    std::vector<int> alternatives;          // per colliding user
    std::vector<std::vector<int>> group;    // [i][label] -> alternative
    std::vector<int> combos;                // users entries per hypothesis
    std::vector<double> loglik;             // per hypothesis
    bool complete = true;
    double clamp_loglik = 0.0;

    int size() const { return static_cast<int>(loglik.size()); }
    const int* combo(int h) const { return combos.data() + static_cast<std::size_t>(h) * users; }
};

/// Enumerates the full product of alternatives with
/// loglik = -|y - sum_i values[i][a_i]|^2 / noise_var. Users are summed in
/// the given order, so identical inputs give bit-identical metrics.
HypothesisTable full_table(cplx y, const std::vector<CVec>& values,
                           const std::vector<std::vector<int>>& group, double noise_var);

/// Function-node update: incoming/outgoing are label-domain log messages
/// indexed [i][label]. Returns the number of hypotheses evaluated.
long fn_update(const HypothesisTable& table, const std::vector<std::vector<double>>& incoming,
               FnMode mode, std::vector<std::vector<double>>& outgoing);

struct FnNodeInput {
    cplx y;
    std::vector<CVec> contributions;               // [i][label] = h * x
    std::vector<std::vector<double>> incoming;     // [i][label], log domain
    double noise_var = 1.0;
    FnMode mode = FnMode::sum_product;
};

struct FnNodeOutput {
    std::vector<std::vector<double>> outgoing;
    long hypotheses = 0;
};

/// Marginalizes over all M^{d_c} label combinations.
FnNodeOutput fn_update_full(const FnNodeInput& in);

/// Marginalizes over the distinct per-user values (m_i per user) and then
/// shares each value's message across its overlapped labels. `group[i][m]`
/// maps labels of user i to value indices; throws ParameterError when the
/// grouping does not match the contributions.
FnNodeOutput fn_update_projected(const FnNodeInput& in, const std::vector<std::vector<int>>& group);

double log_sum_exp(const std::vector<double>& v);

}  // namespace scma
