#pragma once

// Fourier-multiplier operators on Fields: fractional derivatives D^s and J^s,
// the Hilbert transform, d/dx, the smooth frequency cutoff chi, and the
// linear dispersive propagator W_a(t).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "dgbo/grid.hpp"

namespace dgbo {

struct DispersionParams {
  double a = 0.5;   // dispersion exponent in [0, 1]: 0 = BO, 1 = KdV
  int k_power = 1;  // nonlinearity exponent k in u^k u_x

  DispersionParams() = default;
  DispersionParams(double a_, int k_ = 1) : a(a_), k_power(k_) {
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("DispersionParams: a must be in [0,1]");
    if (k_power < 1)
      throw std::invalid_argument("DispersionParams: k_power must be >= 1");
  }
};

// Parity classes of a multiplier symbol. even_real, odd_imaginary and
// hermitian symbols all map real fields to real fields; general symbols
// produce genuinely complex output (see apply_multiplier_complex).
enum class Parity { even_real, odd_imaginary, hermitian, general };

struct MultiplierSymbol {
  std::function<cdouble(double)> eval;
  Parity parity = Parity::general;
  std::string name;
};

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// C-infinity step: 0 for t <= 0, 1 for t >= 1, exp(-1/t)-mollified between.
inline double smoothstep01(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double qa = std::exp(-1.0 / t);
  const double qb = std::exp(-1.0 / (1.0 - t));
  return qa / (qa + qb);
}

// Smooth even bump: 1 on [-1,1], 0 outside (-2,2).
struct CutoffChi {
  double operator()(double xi) const {
    const double ax = std::abs(xi);
    if (ax <= 1.0) return 1.0;
    if (ax >= 2.0) return 0.0;
    return smoothstep01(2.0 - ax);
  }
};

inline double cutoff_chi(double xi) { return CutoffChi{}(xi); }

// ---- symbol constructors ----------------------------------------------

// |k|^s with |0|^s := 0 for s > 0; s = 0 is the identity symbol.
inline MultiplierSymbol homogeneous_symbol(double s) {
  if (s < 0.0)
    throw std::invalid_argument(
        "homogeneous_symbol: s < 0 divides by zero at k=0; use the mean-zero "
        "variant");
  return {[s](double k) -> cdouble {
            if (s == 0.0) return 1.0;
            return k == 0.0 ? 0.0 : std::pow(std::abs(k), s);
          },
          Parity::even_real, "D^" + std::to_string(s)};
}

inline MultiplierSymbol bessel_symbol(double s) {
  return {[s](double k) -> cdouble { return std::pow(1.0 + k * k, 0.5 * s); },
          Parity::even_real, "J^" + std::to_string(s)};
}

inline MultiplierSymbol hilbert_symbol() {
  return {[](double k) -> cdouble { return cdouble(0.0, -sgn(k)); },
          Parity::odd_imaginary, "H"};
}

inline MultiplierSymbol derivative_symbol(int order) {
  if (order < 1) throw std::invalid_argument("derivative_symbol: order >= 1");
  return {[order](double k) -> cdouble {
            return std::pow(cdouble(0.0, k), order);
          },
          (order % 2 == 0) ? Parity::even_real : Parity::odd_imaginary,
          "d/dx^" + std::to_string(order)};
}

inline MultiplierSymbol propagator_symbol(double t, const DispersionParams& p) {
  const double a = p.a;
  return {[t, a](double k) -> cdouble {
            const double phase = -t * std::pow(std::abs(k), 1.0 + a) * k;
            return std::polar(1.0, phase);
          },
          Parity::hermitian, "W_a(" + std::to_string(t) + ")"};
}

inline MultiplierSymbol chi_symbol() {
  return {[](double k) -> cdouble { return cutoff_chi(k); }, Parity::even_real,
          "chi"};
}

// ---- application --------------------------------------------------------

// Pointwise multiplication of the physical spectrum. Realness handling at
// the unpaired Nyquist slot: odd-imaginary symbols are zeroed there and
// hermitian symbols keep only their real part there (the even-real
// component); for resolved fields this touches round-off-level content only.
inline Field apply_multiplier(const Field& f, const MultiplierSymbol& m) {
  if (m.parity == Parity::general)
    throw std::invalid_argument(
        "apply_multiplier: general symbols need apply_multiplier_complex");
  const auto& k = f.grid().k();
  const int n = f.n();
  const int nyq = f.grid().nyquist_index();
  std::vector<cdouble> spec = f.spectrum();
  for (int i = 0; i < n; ++i) {
    cdouble w = m.eval(k[i]);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw std::invalid_argument("apply_multiplier: symbol '" + m.name +
                                  "' non-finite at k=" + std::to_string(k[i]));
    if (i == nyq) {
      if (m.parity == Parity::odd_imaginary) w = 0.0;
      if (m.parity == Parity::hermitian) w = w.real();
    }
    spec[i] *= w;
  }
  return Field::from_spectrum(f.grid_ptr(), spec);
}

// General symbols: returns (real part, imaginary part) as two real Fields.
inline std::pair<Field, Field> apply_multiplier_complex(
    const Field& f, const MultiplierSymbol& m) {
  const auto& k = f.grid().k();
  const int n = f.n();
  std::vector<cdouble> spec = f.spectrum();
  for (int i = 0; i < n; ++i) {
    cdouble w = m.eval(k[i]);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw std::invalid_argument("apply_multiplier_complex: symbol '" +
                                  m.name + "' non-finite at k=" +
                                  std::to_string(k[i]));
    spec[i] *= w;
  }
  // Split g = g_re + i*g_im through the hermitian/antihermitian parts of the
  // spectrum: g_re_hat(k) = (g_hat(k) + conj(g_hat(-k)))/2.
  std::vector<cdouble> re(n), im(n);
  for (int i = 0; i < n; ++i) {
    const int j = (n - i) % n;
    const cdouble gp = spec[i];
    const cdouble gm = std::conj(spec[j]);
    re[i] = 0.5 * (gp + gm);
    im[i] = cdouble(0.0, -0.5) * (gp - gm);
  }
  return {Field::from_spectrum(f.grid_ptr(), re),
          Field::from_spectrum(f.grid_ptr(), im)};
}

// ---- named operators -----------------------------------------------------

inline Field homogeneous_derivative(const Field& f, double s) {
  return apply_multiplier(f, homogeneous_symbol(s));
}

inline Field bessel_derivative(const Field& f, double s) {
  return apply_multiplier(f, bessel_symbol(s));
}

inline Field hilbert_transform(const Field& f) {
  return apply_multiplier(f, hilbert_symbol());
}

inline Field derivative(const Field& f, int order = 1) {
  return apply_multiplier(f, derivative_symbol(order));
}

inline Field linear_propagator(const Field& f, double t,
                               const DispersionParams& p) {
  return apply_multiplier(f, propagator_symbol(t, p));
}

// D^s for s in (-1, 0), defined on mean-zero fields by zeroing the k = 0
// mode and applying |k|^s elsewhere.
inline Field homogeneous_derivative_meanzero(const Field& f, double s) {
  if (!(s > -1.0 && s < 0.0))
    throw std::invalid_argument(
        "homogeneous_derivative_meanzero: s must be in (-1,0)");
  const double mean_scale = std::abs(f.spectrum()[0]);
  double l1 = 0.0;
  for (double v : f.values()) l1 += std::abs(v);
  l1 *= f.h();
  if (mean_scale > 1e-10 * std::max(l1, 1e-300))
    throw std::invalid_argument(
        "homogeneous_derivative_meanzero: field has a nonzero mean; the "
        "symbol is singular at k=0");
  const auto& k = f.grid().k();
  std::vector<cdouble> spec = f.spectrum();
  spec[0] = 0.0;
  for (size_t i = 1; i < spec.size(); ++i)
    spec[i] *= std::pow(std::abs(k[i]), s);
  return Field::from_spectrum(f.grid_ptr(), spec);
}

// Pointwise product with the coordinate, x*f. Not a multiplier; meaningful
// only where f effectively vanishes near the periodic seam.
inline Field coordinate_multiply(const Field& f) {
  std::vector<double> v = f.values();
  const auto& x = f.grid().x();
  for (size_t j = 0; j < v.size(); ++j) v[j] *= x[j];
  return Field::from_values(f.grid_ptr(), v);
}

inline Field pointwise_multiply(const Field& f, const Field& g) {
  std::vector<double> v = f.values();
  for (size_t j = 0; j < v.size(); ++j) v[j] *= g.values()[j];
  return Field::from_values(f.grid_ptr(), v);
}

inline Field scale(const Field& f, double c) {
  std::vector<double> v = f.values();
  for (auto& a : v) a *= c;
  return Field::from_values(f.grid_ptr(), v);
}

inline Field add(const Field& f, const Field& g, double cf = 1.0,
                 double cg = 1.0) {
  std::vector<double> v(f.n());
  for (int j = 0; j < f.n(); ++j)
    v[j] = cf * f.values()[j] + cg * g.values()[j];
  return Field::from_values(f.grid_ptr(), v);
}

// f(x - delta) by the shift multiplier e^{-ik delta}.
inline Field translate(const Field& f, double delta) {
  MultiplierSymbol m;
  m.parity = Parity::hermitian;
  m.name = "translate";
  m.eval = [delta](double k) { return std::polar(1.0, -k * delta); };
  return apply_multiplier(f, m);
}

// Interior L2 norm over |x| <= radius.
inline double interior_l2(const Field& f, double radius) {
  const auto& x = f.grid().x();
  double s = 0.0;
  for (int j = 0; j < f.n(); ++j)
    if (std::abs(x[j]) <= radius) s += f.values()[j] * f.values()[j];
  return std::sqrt(f.h() * s);
}

inline double interior_l2_distance(const Field& f, const Field& g,
                                   double radius) {
  const auto& x = f.grid().x();
  double s = 0.0;
  for (int j = 0; j < f.n(); ++j)
    if (std::abs(x[j]) <= radius) {
      const double d = f.values()[j] - g.values()[j];
      s += d * d;
    }
  return std::sqrt(f.h() * s);
}

}  // namespace dgbo
