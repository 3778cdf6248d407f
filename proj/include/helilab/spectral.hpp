#pragma once

// Periodic-box Fourier machinery on an n x n grid over [0, L)^2.
//
// Storage is row-major with the x1 index slowest: value(i1, i2) lives at
// i1 * n + i2, sampled at (i1 * h, i2 * h).  Forward transforms are the
// unnormalized DFT; inverse transforms divide by n^2.  All multipliers that
// involve 1/|xi| send the zero mode to 0, and odd symbols (derivatives, Riesz)
// vanish on the unpaired Nyquist row/column so real fields stay real.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace helilab {

using cplx = std::complex<double>;

enum class Axis { x1 = 0, x2 = 1 };

class SpectralGrid;
using GridPtr = std::shared_ptr<const SpectralGrid>;

class SpectralGrid {
 public:
  /// Throws std::invalid_argument unless n is even, n >= 8 and box_length > 0.
  static GridPtr create(int n, double box_length);

  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double cell_area() const { return spacing() * spacing(); }
  std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
  std::size_t index(int i1, int i2) const { return static_cast<std::size_t>(i1) * n_ + i2; }
  double coordinate(int i) const { return i * spacing(); }

  /// Signed integer mode of FFT slot i, in {-n/2, ..., n/2 - 1}.
  int mode(int i) const { return i < n_ / 2 ? i : i - n_; }
  /// Physical wavenumber of FFT slot i: (2 pi / L) * mode(i).
  double wavenumber(int i) const { return wavenumbers_[static_cast<std::size_t>(i)]; }
  std::span<const double> wavenumbers() const { return wavenumbers_; }
  /// Wavenumber used by odd symbols: zero on the Nyquist slot.
  double odd_wavenumber(int i) const { return i == n_ / 2 ? 0.0 : wavenumber(i); }
  /// |xi|^2 per spectral slot.
  std::span<const double> wavenumber_sq() const { return k2_; }
  /// 1 on modes kept by the 2/3 rule, 0 elsewhere.
  std::span<const double> dealias_mask() const { return dealias_; }
  /// Largest |xi| represented on the grid.
  double max_wavenumber() const;
  /// (1 + |xi|^2)^s per spectral slot, computed once per exponent.
  std::span<const double> sobolev_weight(double s) const;

 private:
  SpectralGrid(int n, double box_length);

  int n_;
  double length_;
  std::vector<double> wavenumbers_;
  std::vector<double> k2_;
  std::vector<double> dealias_;
  mutable std::mutex weights_mutex_;
  mutable std::map<double, std::vector<double>> sobolev_weights_;
};

/// Grid-sampled scalar field (real or complex).
template <typename T>
class GridField {
 public:
  using value_type = T;

  explicit GridField(GridPtr grid, T fill = T{}) : grid_(std::move(grid)), values_(grid_->size(), fill) {}
  GridField(GridPtr grid, std::vector<T> values);

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& at(int i1, int i2) { return values_[grid_->index(i1, i2)]; }
  const T& at(int i1, int i2) const { return values_[grid_->index(i1, i2)]; }

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(T s);
  /// this += alpha * x
  GridField& add_scaled(T alpha, const GridField& x);

  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(T s, GridField a) { return a *= s; }

 private:
  GridPtr grid_;
  std::vector<T> values_;
};

using ScalarField = GridField<double>;
using ComplexScalarField = GridField<cplx>;

extern template class GridField<double>;
extern template class GridField<cplx>;

/// Samples f(x1, x2) at the grid nodes.
ScalarField sample(const GridPtr& grid, const std::function<double(double, double)>& f);
ComplexScalarField sample_complex(const GridPtr& grid, const std::function<cplx(double, double)>& f);

/// Unnormalized DFT coefficients of a field on the same grid.
class Spectrum {
 public:
  explicit Spectrum(GridPtr grid) : grid_(std::move(grid)), coeffs_(grid_->size()) {}

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }
  const cplx& operator[](std::size_t i) const { return coeffs_[i]; }

  Spectrum& operator+=(const Spectrum& o);

 private:
  GridPtr grid_;
  std::vector<cplx> coeffs_;
};

namespace spectral {

Spectrum forward(const ScalarField& f);
Spectrum forward(const ComplexScalarField& f);
/// Real part of the inverse transform.
ScalarField inverse_real(const Spectrum& s);
ComplexScalarField inverse_complex(const Spectrum& s);
/// forward / inverse_real for two real fields at the cost of one complex transform.
std::array<Spectrum, 2> forward_pair(const ScalarField& a, const ScalarField& b);
std::array<ScalarField, 2> inverse_real_pair(const Spectrum& a, const Spectrum& b);

/// Multiplies every coefficient by symbol(xi1, xi2, slot1, slot2).
void apply_symbol(Spectrum& s, const std::function<cplx(double, double, int, int)>& symbol);

// Spectrum-level operators (in place).
void differentiate(Spectrum& s, Axis axis);
void laplacian(Spectrum& s);
void dealias(Spectrum& s);
void inverse_gradient_riesz(Spectrum& s, Axis axis);

template <typename Field>
Field partial_derivative(const Field& f, Axis axis);
template <typename Field>
std::array<Field, 2> gradient(const Field& f);
template <typename Field>
Field laplacian(const Field& f);
/// Multiplier i xi_m / |xi|.
template <typename Field>
Field riesz(const Field& f, Axis axis);
/// Multiplier |xi|^sigma, zero mode sent to 0.
template <typename Field>
Field fractional_gradient_power(const Field& f, double sigma);
/// Multiplier -1/|xi|^2, zero mode sent to 0.
template <typename Field>
Field inverse_laplacian(const Field& f);
/// Multiplier |xi|^-1 R_m, i.e. i xi_m / |xi|^2.
template <typename Field>
Field inverse_gradient_riesz(const Field& f, Axis axis);
/// 2/3-rule truncation.
template <typename Field>
Field dealias(const Field& f);

/// Discrete H^s norm, Parseval-consistent: sobolev_norm(f, 0) equals l2_norm(f).
double sobolev_norm(const ScalarField& f, double s);
double sobolev_norm(const ComplexScalarField& f, double s);
double sobolev_norm(std::span<const ScalarField> components, double s);
double sobolev_norm(const Spectrum& s, double exponent);

/// Grid quadrature of f.
double integral(const ScalarField& f);
cplx integral(const ComplexScalarField& f);
double mean(const ScalarField& f);
double l2_norm(const ScalarField& f);
double l2_norm(const ComplexScalarField& f);
double max_abs(const ScalarField& f);
double max_abs(const ComplexScalarField& f);

}  // namespace spectral
}  // namespace helilab
