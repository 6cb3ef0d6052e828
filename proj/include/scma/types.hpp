#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace scma {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;

}  // namespace scma
