#pragma once

// Named families of initial data.  Every family is zero-homotopic, stays away
// from -k and relaxes to k (Gaussian-fast) away from the box centre, so with
// width <= L/16 the seam sees u - k below 1e-12.

#include <cstdint>
#include <string>
#include <variant>

#include "helilab/fields.hpp"

namespace helilab {

struct ConstantData {};

/// u = (sin a, 0, cos a), a = epsilon exp(-|x - c|^2 / 2 w^2) cos(2 pi mode (x1 - c1) / L).
struct PlanarRotationData {
  double epsilon = 0.5;
  int mode = 1;
  double width = 1.0;
};

/// Radial bump: polar angle theta(r) = amplitude (r / w) exp((1 - r^2 / w^2) / 2),
/// azimuth equal to the spatial polar angle.  Degree zero for amplitude < pi.
struct BumpData {
  double amplitude = 1.0;
  double width = 1.0;
};

/// u = Pi(k + (f1, f2, 0)), f_c a Gaussian-windowed random trigonometric
/// polynomial with |xi| <= k_max, scaled so max |f_c| = amplitude.
struct RandomBandLimitedData {
  std::uint64_t seed = 1;
  double k_max = 3.0;
  double amplitude = 0.5;
  double width = 1.0;
};

using InitialCondition = std::variant<ConstantData, PlanarRotationData, BumpData, RandomBandLimitedData>;

SphereField make_initial_data(const GridPtr& grid, const InitialCondition& ic);
std::string family_name(const InitialCondition& ic);

}  // namespace helilab
