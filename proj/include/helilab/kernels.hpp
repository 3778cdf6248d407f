#pragma once

// Pointwise grid kernels. Every kernel exists twice: a plain serial loop kept
// as the reference, and an OpenMP version used by the library. Both must
// produce bit-identical results for element-wise kernels; reductions agree to
// roundoff (the OpenMP ones sum fixed-size blocks so they are deterministic
// regardless of thread count).

#include <complex>
#include <cstddef>
#include <span>

namespace helilab::kernels {

using cplx = std::complex<double>;

struct Vec3View {
  std::span<double> x, y, z;
};
struct ConstVec3View {
  std::span<const double> x, y, z;
  ConstVec3View(std::span<const double> a, std::span<const double> b, std::span<const double> c)
      : x(a), y(b), z(c) {}
  ConstVec3View(const Vec3View& v) : x(v.x), y(v.y), z(v.z) {}
};

/// Result of a normalization sweep: the smallest input magnitude and where it was.
struct NormalizeReport {
  double min_norm;
  std::size_t argmin;
};

#define HELILAB_KERNEL_DECLS                                                              \
  void cross(ConstVec3View a, ConstVec3View b, Vec3View out);                             \
  void dot(ConstVec3View a, ConstVec3View b, std::span<double> out);                      \
  NormalizeReport normalize(ConstVec3View in, Vec3View out);                              \
  void axpy(double alpha, std::span<const double> x, std::span<double> y);                \
  void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);                      \
  void multiply(std::span<cplx> data, std::span<const double> factor);                    \
  void multiply(std::span<cplx> data, std::span<const cplx> factor);                      \
  double max_abs(std::span<const double> x);                                              \
  double sum(std::span<const double> x);                                                  \
  double sum_sq(std::span<const double> x);

namespace serial {
HELILAB_KERNEL_DECLS
}  // namespace serial

namespace parallel {
HELILAB_KERNEL_DECLS
}  // namespace parallel

#undef HELILAB_KERNEL_DECLS

}  // namespace helilab::kernels
