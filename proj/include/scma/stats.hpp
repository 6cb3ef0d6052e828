#pragma once

#include <span>

namespace scma {

inline constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for k successes out of n trials.
Interval wilson_interval(long k, long n, double z = kZ95);

/// True when two intervals share no point.
bool disjoint(const Interval& a, const Interval& b);

/// One-sided 95% Student-t quantile (exact table up to 30 dof, then
/// interpolated in 1/dof toward the normal value).
double t_quantile_95(int dof);

struct PairedTest {
    long n = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double t = 0.0;
};

/// Mean and t statistic of paired differences.
PairedTest paired_test(std::span<const double> differences);

/// One-sided test that the differences have positive mean at 95%.
bool positive_at_95(std::span<const double> differences);

}  // namespace scma
