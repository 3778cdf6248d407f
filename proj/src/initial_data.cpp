#include "helilab/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace helilab {

namespace {


SphereField make(const GridPtr& grid, const ConstantData&) { return SphereField::constant(grid, kNorth); }

SphereField make(const GridPtr& grid, const PlanarRotationData& p) {
  const double L = grid->length();
  const double c = 0.5 * L;
  const ScalarField angle = sample(grid, [&](double x1, double x2) {
    const double r2 = (x1 - c) * (x1 - c) + (x2 - c) * (x2 - c);
    return p.epsilon * std::exp(-r2 / (2.0 * p.width * p.width)) *
           std::cos(2.0 * std::numbers::pi * p.mode * (x1 - c) / L);
  });
  Vector3Field y(grid);
  for (std::size_t i = 0; i < y.size(); ++i) y.set(i, {std::sin(angle[i]), 0.0, std::cos(angle[i])});
  return project_to_sphere(y);
}

SphereField make(const GridPtr& grid, const BumpData& p) {
  const double c = 0.5 * grid->length();
  Vector3Field y(grid);
  for (int i1 = 0; i1 < grid->n(); ++i1) {
    for (int i2 = 0; i2 < grid->n(); ++i2) {
      const double x1 = grid->coordinate(i1) - c, x2 = grid->coordinate(i2) - c;
      const double r = std::hypot(x1, x2);
      // theta / r is smooth at the origin, so write sin(theta) x / r that way.
      const double theta_over_r = p.amplitude / p.width * std::exp(0.5 * (1.0 - r * r / (p.width * p.width)));
      const double theta = theta_over_r * r;
      const double sinc = theta == 0.0 ? 1.0 : std::sin(theta) / theta;
      const double radial = sinc * theta_over_r;
      y.set(grid->index(i1, i2), {radial * x1, radial * x2, std::cos(theta)});
    }
  }
  return project_to_sphere(y);
}

SphereField make(const GridPtr& grid, const RandomBandLimitedData& p) {
  const double L = grid->length();
  const double c = 0.5 * L;
  const double dk = 2.0 * std::numbers::pi / L;
  const int mmax = static_cast<int>(std::floor(p.k_max / dk));
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  struct Mode {
    double k1, k2, a, b;
  };
  std::array<std::vector<Mode>, 2> modes;
  for (auto& list : modes) {
    for (int m1 = -mmax; m1 <= mmax; ++m1) {
      for (int m2 = 0; m2 <= mmax; ++m2) {
        if (m2 == 0 && m1 <= 0) continue;  // one representative per +-xi pair
        const double k1 = dk * m1, k2 = dk * m2;
        if (std::hypot(k1, k2) > p.k_max) continue;
        list.push_back({k1, k2, normal(rng), normal(rng)});
      }
    }
  }

  Vector3Field y(grid, kNorth);
  for (int comp = 0; comp < 2; ++comp) {
    ScalarField f = sample(grid, [&](double x1, double x2) {
      double s = 1.0;  // keeps a nonzero value when the mode list is empty
      if (!modes[comp].empty()) {
        s = 0.0;
        for (const auto& m : modes[comp]) {
          const double phase = m.k1 * (x1 - c) + m.k2 * (x2 - c);
          s += m.a * std::cos(phase) + m.b * std::sin(phase);
        }
      }
      const double r2 = (x1 - c) * (x1 - c) + (x2 - c) * (x2 - c);
      return s * std::exp(-r2 / (2.0 * p.width * p.width));
    });
    const double peak = spectral::max_abs(f);
    if (peak > 0.0) f *= p.amplitude / peak;
    y[comp] = std::move(f);
  }
  return project_to_sphere(y);
}

}  // namespace

SphereField make_initial_data(const GridPtr& grid, const InitialCondition& ic) {
  return std::visit([&](const auto& p) { return make(grid, p); }, ic);
}

std::string family_name(const InitialCondition& ic) {
  switch (ic.index()) {
    case 0:
      return "constant";
    case 1:
      return "planar-rotation";
    case 2:
      return "bump";
    default:
      return "random-band-limited";
  }
}

}  // namespace helilab
