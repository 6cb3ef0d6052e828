#include <cmath>
#include <limits>

#include "scma/decoders.hpp"
#include "scma/errors.hpp"

namespace scma {

BruteForceResult brute_force_map(const Codebook& cb, const Received& rx) {
    const int J = cb.fg.J;
    const int K = cb.fg.K;
    const int M = cb.M;
    if (std::pow(static_cast<double>(M), J) > kBruteForceGuard) {
        throw GuardError("M^J exceeds the brute-force guard");
    }
    long total = 1;
    for (int j = 0; j < J; ++j) total *= M;

    std::vector<double> loglik(total);
    std::vector<int> combo(J, 0);
    double best = -std::numeric_limits<double>::infinity();
    long best_index = 0;
    for (long c = 0; c < total; ++c) {
        long rest = c;
        for (int j = J - 1; j >= 0; --j) {
            combo[j] = static_cast<int>(rest % M);
            rest /= M;
        }
        double ll = 0.0;
        for (int k = 0; k < K; ++k) {
            cplx r = rx.y[k];
            for (int j : cb.fg.rows[k]) r -= rx.gains(k, j) * cb.words[j][combo[j]][k];
            ll -= std::norm(r) / rx.noise_var;
        }
        loglik[c] = ll;
        if (ll > best) {
            best = ll;
            best_index = c;
        }
    }

    BruteForceResult out;
    out.combos = total;
    out.marginals.assign(J, std::vector<double>(M, 0.0));
    out.ml_combo.assign(J, 0);
    double z = 0.0;
    for (long c = 0; c < total; ++c) {
        const double w = std::exp(loglik[c] - best);
        z += w;
        long rest = c;
        for (int j = J - 1; j >= 0; --j) {
            out.marginals[j][rest % M] += w;
            rest /= M;
        }
    }
    for (auto& row : out.marginals) {
        for (auto& v : row) v /= z;
    }
    long rest = best_index;
    for (int j = J - 1; j >= 0; --j) {
        out.ml_combo[j] = static_cast<int>(rest % M);
        rest /= M;
    }
    return out;
}

}  // namespace scma
