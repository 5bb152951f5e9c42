#pragma once

// Uniform periodic grid on [-L, L) and real fields with a cached spectral
// representation.
//
// Transform convention (matches the L2(R) Fourier transform restricted to a
// period):   u_hat(k_m) = h * sum_j u(x_j) exp(-i k_m x_j),
// with nodes x_j = -L + h*j, h = 2L/n, and wavenumbers k_m = pi*m/L laid out
// in FFT order (m = 0..n/2-1, then m = -n/2..-1). Since
// exp(-i k_m x_j) = (-1)^m exp(-2*pi*i*m*j/n), the physical spectrum is
// h*(-1)^m times the raw DFT. Discrete Parseval in this normalization reads
//   h * sum u^2 = (1/2L) * sum |u_hat|^2.

#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgbo/fft.hpp"

namespace dgbo {

class SpectralGrid {
 public:
  SpectralGrid(int n, double L)
      : n_(n), L_(L), h_(2.0 * L / n), plan_(fft_plan(n)) {
    if (n < 8 || n % 2 != 0)
      throw std::invalid_argument("SpectralGrid: n must be even and >= 8");
    if (!(L > 0.0)) throw std::invalid_argument("SpectralGrid: L must be > 0");
    x_.resize(n);
    k_.resize(n);
    for (int j = 0; j < n; ++j) x_[j] = -L + h_ * j;
    const double dk = M_PI / L;
    for (int m = 0; m < n / 2; ++m) k_[m] = dk * m;
    for (int m = n / 2; m < n; ++m) k_[m] = dk * (m - n);
  }

  int n() const { return n_; }
  double L() const { return L_; }
  double h() const { return h_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& k() const { return k_; }
  const FftPlan& plan() const { return *plan_; }

  // FFT-order slot of the unpaired Nyquist mode.
  int nyquist_index() const { return n_ / 2; }

  bool same_as(const SpectralGrid& o) const {
    return n_ == o.n_ && L_ == o.L_;
  }

 private:
  int n_;
  double L_;
  double h_;
  std::vector<double> x_;
  std::vector<double> k_;
  std::shared_ptr<const FftPlan> plan_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

inline GridPtr make_grid(int n, double L) {
  return std::make_shared<const SpectralGrid>(n, L);
}

namespace detail {
inline bool all_finite(const std::vector<double>& v) {
  for (double a : v)
    if (!std::isfinite(a)) return false;
  return true;
}
inline bool all_finite(const std::vector<cdouble>& v) {
  for (const auto& a : v)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  return true;
}
}  // namespace detail

// Real-valued samples on a SpectralGrid together with the matching physical
// spectrum. Both representations are computed at construction and the object
// is immutable afterwards, so instances can be shared across threads freely.
class Field {
 public:
  enum class Source { values, spectrum };

  static Field from_values(GridPtr g, std::vector<double> vals) {
    if (!g) throw std::invalid_argument("Field: null grid");
    if (static_cast<int>(vals.size()) != g->n())
      throw std::invalid_argument("Field: value count != grid size");
    if (!detail::all_finite(vals))
      throw std::invalid_argument("Field: non-finite values");
    Field f;
    f.grid_ = std::move(g);
    f.values_ = std::move(vals);
    f.spectrum_ = forward_of(*f.grid_, f.values_);
    f.source_ = Source::values;
    return f;
  }

  // spec is the physical spectrum (grid convention above); values are the
  // real part of the inverse transform.
  static Field from_spectrum(GridPtr g, const std::vector<cdouble>& spec) {
    if (!g) throw std::invalid_argument("Field: null grid");
    if (static_cast<int>(spec.size()) != g->n())
      throw std::invalid_argument("Field: spectrum size != grid size");
    if (!detail::all_finite(spec))
      throw std::invalid_argument("Field: non-finite spectrum");
    Field f;
    f.grid_ = std::move(g);
    f.spectrum_ = spec;
    f.values_ = inverse_of(*f.grid_, spec);
    f.source_ = Source::spectrum;
    return f;
  }

  template <typename Fn>
  static Field sample(GridPtr g, Fn&& fn) {
    std::vector<double> vals(g->n());
    for (int j = 0; j < g->n(); ++j) vals[j] = fn(g->x()[j]);
    return from_values(std::move(g), std::move(vals));
  }

  static Field zero(GridPtr g) {
    return from_values(std::move(g), std::vector<double>(g ? g->n() : 0, 0.0));
  }

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<cdouble>& spectrum() const { return spectrum_; }
  Source source() const { return source_; }

  int n() const { return grid_->n(); }
  double h() const { return grid_->h(); }

  // h * sum u  (equals the zero mode of the physical spectrum)
  double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return grid_->h() * s;
  }

  // sqrt(h * sum u^2)
  double l2_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(grid_->h() * s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  // Raw transforms in the grid convention, usable without a Field wrapper.
  static std::vector<cdouble> forward_of(const SpectralGrid& g,
                                         const std::vector<double>& vals) {
    const int n = g.n();
    std::vector<cdouble> in(vals.begin(), vals.end()), out(n);
    g.plan().forward(in.data(), out.data());
    const double h = g.h();
    for (int m = 0; m < n; ++m) out[m] *= (m % 2 == 0) ? h : -h;
    return out;
  }

  static std::vector<double> inverse_of(const SpectralGrid& g,
                                        const std::vector<cdouble>& spec) {
    const int n = g.n();
    std::vector<cdouble> in(n), out(n);
    const double ih = 1.0 / g.h();
    for (int m = 0; m < n; ++m) in[m] = spec[m] * ((m % 2 == 0) ? ih : -ih);
    g.plan().inverse(in.data(), out.data());
    std::vector<double> vals(n);
    for (int j = 0; j < n; ++j) vals[j] = out[j].real();
    return vals;
  }

 private:
  Field() = default;
  GridPtr grid_;
  std::vector<double> values_;
  std::vector<cdouble> spectrum_;
  Source source_ = Source::values;
};

// forward_transform / inverse_transform as free functions over Fields.
inline std::vector<cdouble> forward_transform(const Field& f) {
  return f.spectrum();
}

inline Field inverse_transform(GridPtr g, const std::vector<cdouble>& spec) {
  return Field::from_spectrum(std::move(g), spec);
}

// Band-limited evaluation of a Field at an arbitrary point:
// u(y) = (1/2L) * sum_m u_hat(k_m) exp(i k_m y).
inline double eval_at(const Field& f, double y) {
  const auto& k = f.grid().k();
  const auto& s = f.spectrum();
  cdouble acc(0.0, 0.0);
  for (size_t m = 0; m < k.size(); ++m)
    acc += s[m] * std::polar(1.0, k[m] * y);
  return acc.real() / (2.0 * f.grid().L());
}

}  // namespace dgbo
