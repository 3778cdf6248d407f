#include "helilab/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace helilab::kernels {

namespace {

constexpr std::ptrdiff_t kReduceBlock = 4096;

std::ptrdiff_t ssize(std::span<const double> s) { return static_cast<std::ptrdiff_t>(s.size()); }

}  // namespace

namespace serial {

void cross(ConstVec3View a, ConstVec3View b, Vec3View out) {
  const std::size_t n = out.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = a.y[i] * b.z[i] - a.z[i] * b.y[i];
    const double cy = a.z[i] * b.x[i] - a.x[i] * b.z[i];
    const double cz = a.x[i] * b.y[i] - a.y[i] * b.x[i];
    out.x[i] = cx;
    out.y[i] = cy;
    out.z[i] = cz;
  }
}

void dot(ConstVec3View a, ConstVec3View b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.x[i] * b.x[i] + a.y[i] * b.y[i] + a.z[i] * b.z[i];
}

NormalizeReport normalize(ConstVec3View in, Vec3View out) {
  NormalizeReport rep{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    const double r = std::sqrt(in.x[i] * in.x[i] + in.y[i] * in.y[i] + in.z[i] * in.z[i]);
    if (r < rep.min_norm) rep = {r, i};
    out.x[i] = in.x[i] / r;
    out.y[i] = in.y[i] / r;
    out.z[i] = in.z[i] / r;
  }
  return rep;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void multiply(std::span<cplx> data, std::span<const double> factor) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factor[i];
}

void multiply(std::span<cplx> data, std::span<const cplx> factor) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factor[i];
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double sum_sq(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace serial

namespace parallel {

void cross(ConstVec3View a, ConstVec3View b, Vec3View out) {
  const auto n = static_cast<std::ptrdiff_t>(out.x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double cx = a.y[i] * b.z[i] - a.z[i] * b.y[i];
    const double cy = a.z[i] * b.x[i] - a.x[i] * b.z[i];
    const double cz = a.x[i] * b.y[i] - a.y[i] * b.x[i];
    out.x[i] = cx;
    out.y[i] = cy;
    out.z[i] = cz;
  }
}

void dot(ConstVec3View a, ConstVec3View b, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a.x[i] * b.x[i] + a.y[i] * b.y[i] + a.z[i] * b.z[i];
}

NormalizeReport normalize(ConstVec3View in, Vec3View out) {
  const auto n = static_cast<std::ptrdiff_t>(out.x.size());
  double min_norm = std::numeric_limits<double>::infinity();
  std::ptrdiff_t argmin = 0;
#pragma omp parallel
  {
    double local_min = std::numeric_limits<double>::infinity();
    std::ptrdiff_t local_arg = 0;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double r = std::sqrt(in.x[i] * in.x[i] + in.y[i] * in.y[i] + in.z[i] * in.z[i]);
      if (r < local_min) {
        local_min = r;
        local_arg = i;
      }
      out.x[i] = in.x[i] / r;
      out.y[i] = in.y[i] / r;
      out.z[i] = in.z[i] / r;
    }
#pragma omp critical
    {
      if (local_min < min_norm || (local_min == min_norm && local_arg < argmin)) {
        min_norm = local_min;
        argmin = local_arg;
      }
    }
  }
  return {min_norm, static_cast<std::size_t>(argmin)};
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void multiply(std::span<cplx> data, std::span<const double> factor) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factor[i];
}

void multiply(std::span<cplx> data, std::span<const cplx> factor) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factor[i];
}

double max_abs(std::span<const double> x) {
  const auto n = ssize(x);
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

namespace {

template <typename Term>
double blocked_sum(std::span<const double> x, Term term) {
  const auto n = ssize(x);
  const std::ptrdiff_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::ptrdiff_t lo = b * kReduceBlock;
    const std::ptrdiff_t hi = std::min(n, lo + kReduceBlock);
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) s += term(x[i]);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

double sum(std::span<const double> x) {
  return blocked_sum(x, [](double v) { return v; });
}

double sum_sq(std::span<const double> x) {
  return blocked_sum(x, [](double v) { return v * v; });
}

}  // namespace parallel

}  // namespace helilab::kernels
