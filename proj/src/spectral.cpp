#include "helilab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "helilab/kernels.hpp"

namespace helilab {

namespace {

// One pair of in-place FFTW plans plus the aligned buffer they act on.  A
// Transform instance is only ever touched by the thread that owns it.
class Transform {
 public:
  explicit Transform(int n) : n_(n) {
    const std::size_t count = static_cast<std::size_t>(n) * n;
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = n >= 64 ? FFTW_MEASURE : FFTW_ESTIMATE;
    forward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_BACKWARD, flags);
  }
  ~Transform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  std::span<cplx> buffer() {
    return {reinterpret_cast<cplx*>(buffer_), static_cast<std::size_t>(n_) * n_};
  }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

  static Transform& for_size(int n) {
    thread_local std::map<int, std::unique_ptr<Transform>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Transform>(n);
    return *slot;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

// ---------------------------------------------------------------------------
// SpectralGrid

SpectralGrid::SpectralGrid(int n, double box_length) : n_(n), length_(box_length) {
  const double dk = 2.0 * std::numbers::pi / box_length;
  wavenumbers_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) wavenumbers_[static_cast<std::size_t>(i)] = dk * mode(i);
  k2_.resize(size());
  dealias_.resize(size());
  const int keep = n / 3;
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const double k1 = wavenumber(i1), k2 = wavenumber(i2);
      k2_[index(i1, i2)] = k1 * k1 + k2 * k2;
      dealias_[index(i1, i2)] = (std::abs(mode(i1)) <= keep && std::abs(mode(i2)) <= keep) ? 1.0 : 0.0;
    }
  }
}

GridPtr SpectralGrid::create(int n, double box_length) {
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("grid size must be even and >= 8, got " + std::to_string(n));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw std::invalid_argument("box length must be positive and finite");
  return GridPtr(new SpectralGrid(n, box_length));
}

double SpectralGrid::max_wavenumber() const {
  const double k = std::abs(wavenumber(n_ / 2));
  return std::sqrt(2.0) * k;
}

std::span<const double> SpectralGrid::sobolev_weight(double s) const {
  std::lock_guard lock(weights_mutex_);
  auto [it, inserted] = sobolev_weights_.try_emplace(s);
  if (inserted) {
    it->second.resize(size());
    for (std::size_t i = 0; i < size(); ++i) it->second[i] = std::pow(1.0 + k2_[i], s);
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// GridField

template <typename T>
GridField<T>::GridField(GridPtr grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw std::invalid_argument("field size does not match grid");
}

template <typename T>
GridField<T>& GridField<T>::operator+=(const GridField& o) {
  return add_scaled(T{1}, o);
}

template <typename T>
GridField<T>& GridField<T>::operator-=(const GridField& o) {
  return add_scaled(T{-1}, o);
}

template <typename T>
GridField<T>& GridField<T>::operator*=(T s) {
  for (auto& v : values_) v *= s;
  return *this;
}

template <typename T>
GridField<T>& GridField<T>::add_scaled(T alpha, const GridField& x) {
  kernels::parallel::axpy(alpha, x.values(), values());
  return *this;
}

template class GridField<double>;
template class GridField<cplx>;

ScalarField sample(const GridPtr& grid, const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (int i1 = 0; i1 < grid->n(); ++i1)
    for (int i2 = 0; i2 < grid->n(); ++i2) out.at(i1, i2) = f(grid->coordinate(i1), grid->coordinate(i2));
  return out;
}

ComplexScalarField sample_complex(const GridPtr& grid, const std::function<cplx(double, double)>& f) {
  ComplexScalarField out(grid);
  for (int i1 = 0; i1 < grid->n(); ++i1)
    for (int i2 = 0; i2 < grid->n(); ++i2) out.at(i1, i2) = f(grid->coordinate(i1), grid->coordinate(i2));
  return out;
}

Spectrum& Spectrum::operator+=(const Spectrum& o) {
  kernels::parallel::axpy(cplx{1.0}, o.coeffs(), coeffs());
  return *this;
}

namespace spectral {

namespace {

template <typename Source>
Spectrum forward_impl(const Source& f) {
  const auto& g = f.grid();
  Transform& t = Transform::for_size(g.n());
  auto buf = t.buffer();
  const auto in = f.values();
  const auto n = static_cast<std::ptrdiff_t>(buf.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) buf[i] = cplx(in[i]);
  t.forward();
  Spectrum s(f.grid_ptr());
  std::copy(buf.begin(), buf.end(), s.coeffs().begin());
  return s;
}

std::span<cplx> backward_into_buffer(const Spectrum& s) {
  Transform& t = Transform::for_size(s.grid().n());
  auto buf = t.buffer();
  std::copy(s.coeffs().begin(), s.coeffs().end(), buf.begin());
  t.backward();
  return buf;
}

template <typename Field>
Spectrum to_spectrum(const Field& f) {
  return forward(f);
}

template <typename Field>
Field from_spectrum(const Spectrum& s);

template <>
ScalarField from_spectrum<ScalarField>(const Spectrum& s) {
  return inverse_real(s);
}
template <>
ComplexScalarField from_spectrum<ComplexScalarField>(const Spectrum& s) {
  return inverse_complex(s);
}

// Applies a per-slot multiplier given as factor(i1, i2) -> cplx.
template <typename Factor>
void scale_slots(Spectrum& s, Factor factor) {
  const auto& g = s.grid();
  const int n = g.n();
  auto c = s.coeffs();
#pragma omp parallel for schedule(static)
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) c[g.index(i1, i2)] *= factor(i1, i2);
}

template <typename Field, typename Factor>
Field apply_factor(const Field& f, Factor factor) {
  Spectrum s = forward(f);
  scale_slots(s, factor);
  return from_spectrum<Field>(s);
}

}  // namespace

Spectrum forward(const ScalarField& f) { return forward_impl(f); }
Spectrum forward(const ComplexScalarField& f) { return forward_impl(f); }

ScalarField inverse_real(const Spectrum& s) {
  auto buf = backward_into_buffer(s);
  ScalarField out(s.grid_ptr());
  auto v = out.values();
  const double scale = 1.0 / static_cast<double>(buf.size());
  const auto n = static_cast<std::ptrdiff_t>(buf.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) v[i] = buf[i].real() * scale;
  return out;
}

// Two real fields share one complex transform: Z = F[a + i b] gives
// A_k = (Z_k + conj Z_-k) / 2 and B_k = (Z_k - conj Z_-k) / 2i.
std::array<Spectrum, 2> forward_pair(const ScalarField& a, const ScalarField& b) {
  const auto& g = a.grid();
  Transform& t = Transform::for_size(g.n());
  auto buf = t.buffer();
  const auto va = a.values();
  const auto vb = b.values();
  const auto size = static_cast<std::ptrdiff_t>(buf.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) buf[i] = cplx(va[i], vb[i]);
  t.forward();
  std::array<Spectrum, 2> out{Spectrum(a.grid_ptr()), Spectrum(a.grid_ptr())};
  auto ca = out[0].coeffs();
  auto cb = out[1].coeffs();
  const int n = g.n();
#pragma omp parallel for schedule(static)
  for (int i1 = 0; i1 < n; ++i1) {
    const int j1 = (n - i1) % n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int j2 = (n - i2) % n;
      const cplx z = buf[g.index(i1, i2)];
      const cplx zc = std::conj(buf[g.index(j1, j2)]);
      ca[g.index(i1, i2)] = 0.5 * (z + zc);
      cb[g.index(i1, i2)] = cplx(0.0, -0.5) * (z - zc);
    }
  }
  return out;
}

// Inverse of two spectra whose real parts are wanted, via their Hermitian
// parts packed as H(A) + i H(B); equal to inverse_real applied to each.
std::array<ScalarField, 2> inverse_real_pair(const Spectrum& a, const Spectrum& b) {
  const auto& g = a.grid();
  Transform& t = Transform::for_size(g.n());
  auto buf = t.buffer();
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  const int n = g.n();
  const cplx I(0.0, 1.0);
#pragma omp parallel for schedule(static)
  for (int i1 = 0; i1 < n; ++i1) {
    const int j1 = (n - i1) % n;
    for (int i2 = 0; i2 < n; ++i2) {
      const int j2 = (n - i2) % n;
      const std::size_t k = g.index(i1, i2), kr = g.index(j1, j2);
      const cplx ha = 0.5 * (ca[k] + std::conj(ca[kr]));
      const cplx hb = 0.5 * (cb[k] + std::conj(cb[kr]));
      buf[k] = ha + I * hb;
    }
  }
  t.backward();
  std::array<ScalarField, 2> out{ScalarField(a.grid_ptr()), ScalarField(a.grid_ptr())};
  auto va = out[0].values();
  auto vb = out[1].values();
  const double scale = 1.0 / static_cast<double>(buf.size());
  const auto size = static_cast<std::ptrdiff_t>(buf.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < size; ++i) {
    va[i] = buf[i].real() * scale;
    vb[i] = buf[i].imag() * scale;
  }
  return out;
}

ComplexScalarField inverse_complex(const Spectrum& s) {
  auto buf = backward_into_buffer(s);
  ComplexScalarField out(s.grid_ptr());
  auto v = out.values();
  const double scale = 1.0 / static_cast<double>(buf.size());
  const auto n = static_cast<std::ptrdiff_t>(buf.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) v[i] = buf[i] * scale;
  return out;
}

void apply_symbol(Spectrum& s, const std::function<cplx(double, double, int, int)>& symbol) {
  const auto& g = s.grid();
  scale_slots(s, [&](int i1, int i2) { return symbol(g.wavenumber(i1), g.wavenumber(i2), i1, i2); });
}

void differentiate(Spectrum& s, Axis axis) {
  const auto& g = s.grid();
  if (axis == Axis::x1)
    scale_slots(s, [&](int i1, int) { return cplx(0.0, g.odd_wavenumber(i1)); });
  else
    scale_slots(s, [&](int, int i2) { return cplx(0.0, g.odd_wavenumber(i2)); });
}

void laplacian(Spectrum& s) {
  kernels::parallel::multiply(s.coeffs(), s.grid().wavenumber_sq());
  auto c = s.coeffs();
  for (auto& v : c) v = -v;
}

void dealias(Spectrum& s) { kernels::parallel::multiply(s.coeffs(), s.grid().dealias_mask()); }

void inverse_gradient_riesz(Spectrum& s, Axis axis) {
  const auto& g = s.grid();
  const auto k2 = g.wavenumber_sq();
  scale_slots(s, [&](int i1, int i2) {
    const double kk = k2[g.index(i1, i2)];
    if (kk == 0.0) return cplx(0.0);
    const double km = axis == Axis::x1 ? g.odd_wavenumber(i1) : g.odd_wavenumber(i2);
    return cplx(0.0, km / kk);
  });
}

template <typename Field>
Field partial_derivative(const Field& f, Axis axis) {
  Spectrum s = forward(f);
  differentiate(s, axis);
  return from_spectrum<Field>(s);
}

template <typename Field>
std::array<Field, 2> gradient(const Field& f) {
  const Spectrum s = forward(f);
  Spectrum s1 = s, s2 = s;
  differentiate(s1, Axis::x1);
  differentiate(s2, Axis::x2);
  return {from_spectrum<Field>(s1), from_spectrum<Field>(s2)};
}

template <typename Field>
Field laplacian(const Field& f) {
  Spectrum s = forward(f);
  laplacian(s);
  return from_spectrum<Field>(s);
}

template <typename Field>
Field riesz(const Field& f, Axis axis) {
  const auto& g = f.grid();
  const auto k2 = g.wavenumber_sq();
  return apply_factor(f, [&](int i1, int i2) {
    const double kk = k2[g.index(i1, i2)];
    if (kk == 0.0) return cplx(0.0);
    const double km = axis == Axis::x1 ? g.odd_wavenumber(i1) : g.odd_wavenumber(i2);
    return cplx(0.0, km / std::sqrt(kk));
  });
}

template <typename Field>
Field fractional_gradient_power(const Field& f, double sigma) {
  const auto& g = f.grid();
  const auto k2 = g.wavenumber_sq();
  return apply_factor(f, [&](int i1, int i2) {
    const double kk = k2[g.index(i1, i2)];
    if (kk == 0.0) return cplx(0.0);
    return cplx(std::pow(kk, 0.5 * sigma));
  });
}

template <typename Field>
Field inverse_laplacian(const Field& f) {
  const auto& g = f.grid();
  const auto k2 = g.wavenumber_sq();
  return apply_factor(f, [&](int i1, int i2) {
    const double kk = k2[g.index(i1, i2)];
    return kk == 0.0 ? cplx(0.0) : cplx(-1.0 / kk);
  });
}

template <typename Field>
Field inverse_gradient_riesz(const Field& f, Axis axis) {
  Spectrum s = forward(f);
  inverse_gradient_riesz(s, axis);
  return from_spectrum<Field>(s);
}

template <typename Field>
Field dealias(const Field& f) {
  Spectrum s = forward(f);
  dealias(s);
  return from_spectrum<Field>(s);
}

#define HELILAB_INSTANTIATE(Field)                                        \
  template Field partial_derivative<Field>(const Field&, Axis);           \
  template std::array<Field, 2> gradient<Field>(const Field&);            \
  template Field laplacian<Field>(const Field&);                          \
  template Field riesz<Field>(const Field&, Axis);                        \
  template Field fractional_gradient_power<Field>(const Field&, double);  \
  template Field inverse_laplacian<Field>(const Field&);                  \
  template Field inverse_gradient_riesz<Field>(const Field&, Axis);       \
  template Field dealias<Field>(const Field&);

HELILAB_INSTANTIATE(ScalarField)
HELILAB_INSTANTIATE(ComplexScalarField)
#undef HELILAB_INSTANTIATE

double sobolev_norm(const Spectrum& s, double exponent) {
  const auto& g = s.grid();
  const auto w = g.sobolev_weight(exponent);
  const auto c = s.coeffs();
  const auto n = static_cast<std::ptrdiff_t>(c.size());
  std::vector<double> terms(c.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) terms[i] = w[i] * std::norm(c[i]);
  const double acc = kernels::parallel::sum(terms);
  return std::sqrt(acc * g.cell_area() / static_cast<double>(g.size()));
}

double sobolev_norm(const ScalarField& f, double s) { return sobolev_norm(forward(f), s); }
double sobolev_norm(const ComplexScalarField& f, double s) { return sobolev_norm(forward(f), s); }

double sobolev_norm(std::span<const ScalarField> components, double s) {
  double acc = 0.0;
  for (const auto& c : components) {
    const double v = sobolev_norm(c, s);
    acc += v * v;
  }
  return std::sqrt(acc);
}

double integral(const ScalarField& f) { return kernels::parallel::sum(f.values()) * f.grid().cell_area(); }

cplx integral(const ComplexScalarField& f) {
  cplx acc = 0.0;
  for (const auto& v : f.values()) acc += v;
  return acc * f.grid().cell_area();
}

double mean(const ScalarField& f) { return kernels::parallel::sum(f.values()) / static_cast<double>(f.size()); }

double l2_norm(const ScalarField& f) {
  return std::sqrt(kernels::parallel::sum_sq(f.values()) * f.grid().cell_area());
}

double l2_norm(const ComplexScalarField& f) {
  double acc = 0.0;
  for (const auto& v : f.values()) acc += std::norm(v);
  return std::sqrt(acc * f.grid().cell_area());
}

double max_abs(const ScalarField& f) { return kernels::parallel::max_abs(f.values()); }

double max_abs(const ComplexScalarField& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace spectral
}  // namespace helilab
