#pragma once

#include <algorithm>
#include <cmath>

namespace harmform {

// Numerical thresholds shared across the library.  All supported objects
// have O(1) entries (orthonormal bases, normalized metrics), so a fixed
// relative scale with a small absolute floor is adequate.
namespace tol {
inline constexpr double rel = 1e-9;        // generic relative comparison scale
inline constexpr double abs_floor = 1e-12; // absolute floor for near-zero data
inline constexpr double kernel = 1e-8;     // sv < kernel*max(1,sv_max) counts as zero
inline constexpr double rank1 = 1e-8;      // sigma2/sigma1 bound declaring rank one
inline constexpr double ratio = 1e-8;      // proportionality residual for form ratios
inline constexpr double harmonic = 1e-8;   // oracle harmonicity residual bound
}  // namespace tol

// |a-b| <= rel*scale with scale defaulting to the larger magnitude.
inline bool close(double a, double b, double scale = 0.0) {
  double s = std::max({scale, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= std::max(tol::rel * s, tol::abs_floor);
}

}  // namespace harmform
