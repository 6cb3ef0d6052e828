#include "scma/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "scma/errors.hpp"

namespace scma {

Interval wilson_interval(long k, long n, double z) {
    if (n <= 0) throw ParameterError("Wilson interval needs n >= 1");
    if (k < 0 || k > n) throw ParameterError("successes must lie in [0, n]");
    const double nn = static_cast<double>(n);
    const double p = k / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

bool disjoint(const Interval& a, const Interval& b) { return a.hi < b.lo || b.hi < a.lo; }

double t_quantile_95(int dof) {
    static constexpr std::array<double, 30> table = {
        6.313752, 2.919986, 2.353363, 2.131847, 2.015048, 1.943180, 1.894579, 1.859548,
        1.833113, 1.812461, 1.795885, 1.782288, 1.770933, 1.761310, 1.753050, 1.745884,
        1.739607, 1.734064, 1.729133, 1.724718, 1.720743, 1.717144, 1.713872, 1.710882,
        1.708141, 1.705618, 1.703288, 1.701131, 1.699127, 1.697261};
    if (dof < 1) throw ParameterError("t quantile needs dof >= 1");
    if (dof <= 30) return table[dof - 1];
    // linear in 1/dof between 30 dof and the normal limit
    constexpr double z = 1.644854;
    return z + (table[29] - z) * 30.0 / dof;
}

PairedTest paired_test(std::span<const double> differences) {
    PairedTest r;
    r.n = static_cast<long>(differences.size());
    if (r.n < 2) throw ParameterError("paired test needs at least two pairs");
    double sum = 0.0;
    for (double d : differences) sum += d;
    r.mean = sum / r.n;
    double ss = 0.0;
    for (double d : differences) ss += (d - r.mean) * (d - r.mean);
    r.stderr_ = std::sqrt(ss / (r.n - 1) / r.n);
    r.t = r.stderr_ > 0.0 ? r.mean / r.stderr_ : (r.mean > 0.0 ? INFINITY : (r.mean < 0.0 ? -INFINITY : 0.0));
    return r;
}

bool positive_at_95(std::span<const double> differences) {
    const auto r = paired_test(differences);
    return r.t > t_quantile_95(static_cast<int>(r.n - 1));
}

}  // namespace scma
