#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "helilab/kernels.hpp"

namespace k = helilab::kernels;

namespace {

std::vector<double> randoms(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

struct Triple {
  std::vector<double> x, y, z;
  explicit Triple(std::size_t n, unsigned seed) : x(randoms(n, seed)), y(randoms(n, seed + 1)), z(randoms(n, seed + 2)) {}
  k::Vec3View view() { return {x, y, z}; }
  k::ConstVec3View cview() const { return {x, y, z}; }
};

class KernelSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelSizes, ElementwiseKernelsAreBitIdentical) {
  const std::size_t n = GetParam();
  Triple a(n, 1), b(n, 7), s(n, 0), p(n, 0);
  k::serial::cross(a.cview(), b.cview(), s.view());
  k::parallel::cross(a.cview(), b.cview(), p.view());
  EXPECT_EQ(s.x, p.x);
  EXPECT_EQ(s.y, p.y);
  EXPECT_EQ(s.z, p.z);

  std::vector<double> ds(n), dp(n);
  k::serial::dot(a.cview(), b.cview(), ds);
  k::parallel::dot(a.cview(), b.cview(), dp);
  EXPECT_EQ(ds, dp);

  const auto rs = k::serial::normalize(a.cview(), s.view());
  const auto rp = k::parallel::normalize(a.cview(), p.view());
  EXPECT_EQ(s.x, p.x);
  EXPECT_EQ(s.z, p.z);
  EXPECT_EQ(rs.min_norm, rp.min_norm);
  EXPECT_EQ(rs.argmin, rp.argmin);

  std::vector<double> ys = b.x, yp = b.x;
  k::serial::axpy(0.3, a.x, ys);
  k::parallel::axpy(0.3, a.x, yp);
  EXPECT_EQ(ys, yp);

  std::vector<k::cplx> cs(n), cp(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    cs[i] = cp[i] = {a.x[i], a.y[i]};
    f[i] = {b.x[i], b.y[i]};
  }
  k::serial::multiply(cs, f);
  k::parallel::multiply(cp, f);
  EXPECT_EQ(cs, cp);
  k::serial::multiply(cs, std::span<const double>(a.z));
  k::parallel::multiply(cp, std::span<const double>(a.z));
  EXPECT_EQ(cs, cp);
  k::serial::axpy(k::cplx(0.5, -1.0), f, cs);
  k::parallel::axpy(k::cplx(0.5, -1.0), f, cp);
  EXPECT_EQ(cs, cp);
}

TEST_P(KernelSizes, ReductionsAgreeToRoundoff) {
  const std::size_t n = GetParam();
  const auto x = randoms(n, 3);
  const double ss = k::serial::sum(x), sp = k::parallel::sum(x);
  EXPECT_NEAR(ss, sp, 1e-12 * n);
  EXPECT_NEAR(k::serial::sum_sq(x), k::parallel::sum_sq(x), 1e-12 * n);
  EXPECT_EQ(k::serial::max_abs(x), k::parallel::max_abs(x));
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelSizes, ::testing::Values(1, 17, 4096, 100003));

TEST(Kernels, NormalizeReportsSmallestInput) {
  std::vector<double> x{3.0, 0.0, 1.0}, y{4.0, 0.5, 0.0}, z{0.0, 0.0, 0.0};
  std::vector<double> ox(3), oy(3), oz(3);
  const auto r = k::parallel::normalize({x, y, z}, {ox, oy, oz});
  EXPECT_DOUBLE_EQ(r.min_norm, 0.5);
  EXPECT_EQ(r.argmin, 1u);
  EXPECT_DOUBLE_EQ(ox[0], 0.6);
  EXPECT_DOUBLE_EQ(oy[0], 0.8);
}

TEST(Kernels, CrossOfBasisVectors) {
  std::vector<double> ax{1}, ay{0}, az{0}, bx{0}, by{1}, bz{0}, ox(1), oy(1), oz(1);
  k::serial::cross({ax, ay, az}, {bx, by, bz}, {ox, oy, oz});
  EXPECT_EQ(ox[0], 0.0);
  EXPECT_EQ(oy[0], 0.0);
  EXPECT_EQ(oz[0], 1.0);
}

}  // namespace
