#pragma once

#include <complex>
#include <cstdint>

namespace rslab {

// Working scalar for all transcendental computation.  The x86 extended
// format carries a 64-bit mantissa (~1.1e-19 eps), which leaves several
// orders of headroom over the tightest tolerance used anywhere (1e-12).
using Real = long double;
using Complex = std::complex<Real>;

inline constexpr Real kPi = 3.14159265358979323846264338327950288L;
inline constexpr Real kTwoPi = 2.0L * kPi;
inline constexpr Real kEulerGamma = 0.57721566490153286060651209008240243L;

// vol(SL_2(Z)\H) with respect to y^-2 dx dy.
inline constexpr Real kModularCovolume = kPi / 3.0L;

}  // namespace rslab
