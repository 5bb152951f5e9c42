#pragma once

// Weighted L2 norms with truncated weights, the (Sobolev, weight) norm pair,
// tail-exponent estimation by dyadic-bin regression, and the box-growth
// convergence/divergence verdict.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "dgbo/operators.hpp"

namespace dgbo {

// Truncated weight <x>_N^r: equals <x>^r = (1+x^2)^{r/2} for |x| <= N and
// the constant (2N)^r for |x| >= 3N, smooth, even, nondecreasing in |x|, and
// pointwise nondecreasing in N. The transition on N <= |x| <= 3N uses a
// shaped derivative in log-weight,
//   G(x) = ln<x> - D(x),   D'(x) = (ln<x>)' * (1 - (1 - s(q))^p),
// with s the quintic smoothstep of q = (|x|-N)/(2N) and the exponent p(N)
// solved so that the plateau lands on ln(2N) exactly. A plain smoothstep
// blend of the two log-weights overshoots the plateau and is not monotone;
// the shaped-derivative form keeps D >= 0 increasing, hence G below ln<x>
// and nondecreasing.
struct WeightSpec {
  double r = 0.0;
  double N = std::numeric_limits<double>::infinity();

  WeightSpec() = default;
  WeightSpec(double r_, double N_ = std::numeric_limits<double>::infinity())
      : r(r_), N(N_) {
    if (r < 0.0) throw std::invalid_argument("WeightSpec: r must be >= 0");
    if (!(N > 0.0)) throw std::invalid_argument("WeightSpec: N must be > 0");
  }
};

namespace detail {

inline double quintic_smoothstep(double q) {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  return q * q * q * (q * (6.0 * q - 15.0) + 10.0);
}

// Deficit table for one truncation level N (r-independent; the log-weight
// scales linearly in r). Built on a fixed grid so results are deterministic.
struct WeightTable {
  double p = 1.0;
  std::vector<double> deficit;  // D at q_i = i/(nq-1), i = 0..nq-1
  static constexpr int nq = 16385;
};

inline WeightTable build_weight_table(double N) {
  WeightTable tab;
  const int nq = WeightTable::nq;
  std::vector<double> q(nq), phip(nq);
  for (int i = 0; i < nq; ++i) {
    q[i] = static_cast<double>(i) / (nq - 1);
    const double y = N + 2.0 * N * q[i];
    phip[i] = y / (1.0 + y * y);  // d/dy ln<y>
  }
  const double target =
      0.5 * std::log1p(9.0 * N * N) - std::log(2.0 * N);  // total deficit
  const double dy = 2.0 * N / (nq - 1);
  auto total = [&](double p) {
    double s = 0.0;
    double prev = 0.0;  // integrand at q=0 is phip*(1-1)=0
    for (int i = 1; i < nq; ++i) {
      const double cur =
          phip[i] * (1.0 - std::pow(1.0 - quintic_smoothstep(q[i]), p));
      s += 0.5 * (prev + cur) * dy;
      prev = cur;
    }
    return s;
  };
  double lo = 0.1, hi = 8.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  tab.p = 0.5 * (lo + hi);
  tab.deficit.assign(nq, 0.0);
  double prev = 0.0;
  for (int i = 1; i < nq; ++i) {
    const double cur =
        phip[i] * (1.0 - std::pow(1.0 - quintic_smoothstep(q[i]), tab.p));
    tab.deficit[i] = tab.deficit[i - 1] + 0.5 * (prev + cur) * dy;
    prev = cur;
  }
  const double scale = target / tab.deficit[nq - 1];
  for (auto& d : tab.deficit) d *= scale;
  return tab;
}

inline const WeightTable& weight_table(double N) {
  static std::mutex m;
  static std::map<double, WeightTable> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, build_weight_table(N)).first;
  return it->second;
}

}  // namespace detail

inline double weight_value(double x, const WeightSpec& w) {
  const double ax = std::abs(x);
  const double logx = 0.5 * std::log1p(x * x);  // ln<x>
  if (!std::isfinite(w.N)) return std::exp(w.r * logx);
  if (ax <= w.N) return std::exp(w.r * logx);
  if (ax >= 3.0 * w.N) return std::pow(2.0 * w.N, w.r);
  const auto& tab = detail::weight_table(w.N);
  const double q = (ax - w.N) / (2.0 * w.N);
  const double pos = q * (detail::WeightTable::nq - 1);
  const int i = std::min(static_cast<int>(pos), detail::WeightTable::nq - 2);
  const double fr = pos - i;
  const double D =
      (1.0 - fr) * tab.deficit[i] + fr * tab.deficit[i + 1];
  return std::exp(w.r * (logx - D));
}

namespace detail {

// d/dx ln w and d^2/dx^2 ln w in closed form. Only the deficit D itself needs
// the table; its derivatives are explicit, which matters because the tabulated
// D is piecewise linear and must not be differenced.
inline void weight_log_derivs(double x, const WeightSpec& w, double& g1,
                              double& g2) {
  const double c = x / (1.0 + x * x);               // (ln<x>)'
  const double cp = (1.0 - x * x) /                 // (ln<x>)''
                    ((1.0 + x * x) * (1.0 + x * x));
  const double ax = std::abs(x);
  if (!std::isfinite(w.N) || ax <= w.N) {
    g1 = w.r * c;
    g2 = w.r * cp;
    return;
  }
  if (ax >= 3.0 * w.N) {
    g1 = 0.0;
    g2 = 0.0;
    return;
  }
  const double p = weight_table(w.N).p;
  const double q = (ax - w.N) / (2.0 * w.N);
  const double s = quintic_smoothstep(q);
  const double sp = 30.0 * q * q * (q - 1.0) * (q - 1.0);  // s'(q)
  const double shape = std::pow(1.0 - s, p);               // (1-s)^p
  const double dshape = -p * std::pow(1.0 - s, p - 1.0) * sp /
                        (2.0 * w.N) * sgn(x);              // d shape / dx
  g1 = w.r * c * shape;
  g2 = w.r * (cp * shape + c * dshape);
}

}  // namespace detail

inline double weight_derivative(double x, const WeightSpec& w) {
  double g1, g2;
  detail::weight_log_derivs(x, w, g1, g2);
  return g1 * weight_value(x, w);
}

inline double weight_second_derivative(double x, const WeightSpec& w) {
  double g1, g2;
  detail::weight_log_derivs(x, w, g1, g2);
  return (g2 + g1 * g1) * weight_value(x, w);
}

// sqrt(h * sum w(x_j)^2 f(x_j)^2)
inline double weighted_l2_norm(const Field& f, const WeightSpec& w) {
  const auto& x = f.grid().x();
  double s = 0.0;
  for (int j = 0; j < f.n(); ++j) {
    const double wf = weight_value(x[j], w) * f.values()[j];
    s += wf * wf;
  }
  return std::sqrt(f.h() * s);
}

struct ZNorm {
  double sobolev = 0.0;  // ||J^s f||_2
  double weight = 0.0;   // ||<x>^r f||_2
};

inline ZNorm z_norm(const Field& f, double s, double r) {
  ZNorm z;
  z.sobolev = bessel_derivative(f, s).l2_norm();
  z.weight = weighted_l2_norm(f, WeightSpec(r));
  return z;
}

// Zero-mean class membership: |f_hat(0)| below tol relative to the L2 size.
inline bool zdot_member(const Field& f, double tol = 1e-10) {
  const double mean_scale = std::abs(f.spectrum()[0]);
  const double size = f.l2_norm() * std::sqrt(2.0 * f.grid().L());
  return mean_scale < tol * std::max(size, 1e-300);
}

// Ratio lhs/rhs of the weighted interpolation inequality
// ||J^{theta*alpha}(<x>^{(1-theta)b} f)||_2
//    <= C ||<x>^b f||_2^{1-theta} ||J^alpha f||_2^theta.
inline double interpolation_ratio(const Field& f, double alpha, double b,
                                  double theta) {
  const auto& x = f.grid().x();
  std::vector<double> v(f.n());
  for (int j = 0; j < f.n(); ++j)
    v[j] = weight_value(x[j], WeightSpec((1.0 - theta) * b)) * f.values()[j];
  const Field wf = Field::from_values(f.grid_ptr(), v);
  const double lhs = bessel_derivative(wf, theta * alpha).l2_norm();
  const double rhs =
      std::pow(weighted_l2_norm(f, WeightSpec(b)), 1.0 - theta) *
      std::pow(bessel_derivative(f, alpha).l2_norm(), theta);
  return lhs / rhs;
}

// ---- tail exponent -------------------------------------------------------

struct TailFit {
  double slope = 0.0;
  double x_lo = 0.0, x_hi = 0.0;
  double r2 = 0.0;
  int samples = 0;     // surviving bins
  bool reliable = false;
};

enum class TailSide { both, left, right };

// Least-squares slope of log(bin-averaged |f|) against log|x| over
// geometrically spaced bins on [x_lo, x_hi]. TailSide::both pools the two
// tails into the same |x| bins (symmetric average); bins whose average falls
// below 1e-14 * max|f| are dropped, and fewer than 4 surviving bins flags
// the fit unreliable.
inline TailFit tail_exponent(const Field& f, double x_lo, double x_hi,
                             int nbins = 8, TailSide side = TailSide::both) {
  if (!(0.0 < x_lo && x_lo < x_hi))
    throw std::invalid_argument("tail_exponent: need 0 < x_lo < x_hi");
  if (x_hi > 0.8 * f.grid().L() + 1e-12)
    throw std::invalid_argument(
        "tail_exponent: window exceeds the interior mask 0.8*L");
  if (nbins < 8)
    throw std::invalid_argument("tail_exponent: need at least 8 bins");

  TailFit fit;
  fit.x_lo = x_lo;
  fit.x_hi = x_hi;

  const double lr = std::log(x_hi / x_lo);
  const auto& x = f.grid().x();
  std::vector<double> sum_abs(nbins, 0.0), sum_logx(nbins, 0.0);
  std::vector<int> count(nbins, 0);
  for (int j = 0; j < f.n(); ++j) {
    const double ax = std::abs(x[j]);
    if (ax < x_lo || ax >= x_hi) continue;
    if (side == TailSide::left && x[j] >= 0.0) continue;
    if (side == TailSide::right && x[j] <= 0.0) continue;
    int b = static_cast<int>(std::log(ax / x_lo) / lr * nbins);
    b = std::clamp(b, 0, nbins - 1);
    sum_abs[b] += std::abs(f.values()[j]);
    sum_logx[b] += std::log(ax);
    ++count[b];
  }

  const double floor = 1e-14 * f.max_abs();
  std::vector<double> lx, ly;
  for (int b = 0; b < nbins; ++b) {
    if (count[b] == 0) continue;
    const double avg = sum_abs[b] / count[b];
    if (avg < floor) continue;
    lx.push_back(sum_logx[b] / count[b]);
    ly.push_back(std::log(avg));
  }
  fit.samples = static_cast<int>(lx.size());
  if (fit.samples < 2) return fit;

  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= fit.samples;
  my /= fit.samples;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.reliable = fit.samples >= 4;
  return fit;
}

// ---- box growth ----------------------------------------------------------

enum class GrowthVerdict { convergent, divergent, indeterminate };

inline const char* to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::convergent: return "convergent";
    case GrowthVerdict::divergent: return "divergent";
    default: return "indeterminate";
  }
}

struct GrowthReport {
  double norm1 = 0.0, norm2 = 0.0, norm4 = 0.0;  // at window ell, 2ell, 4ell
  double q = 0.0;  // increment ratio
  GrowthVerdict verdict = GrowthVerdict::indeterminate;
};

// Convergence of ||<x>^r u||_2 under window doubling is decided by the
// increment ratio q = (N(4l)^2 - N(2l)^2) / (N(2l)^2 - N(l)^2). For a tail
// |u| ~ x^-p the increments scale like 2^{2(r-p+1/2)} per doubling, so q
// separates cleanly: q >= 1.10 divergent, q <= 0.90 convergent, otherwise
// indeterminate. (Raw norm ratios approach 1 from above in both regimes and
// do not separate at these exponent gaps.)
inline GrowthReport box_growth_verdict(double norm1, double norm2,
                                       double norm4, double divergent_min = 1.10,
                                       double convergent_max = 0.90) {
  GrowthReport rep;
  rep.norm1 = norm1;
  rep.norm2 = norm2;
  rep.norm4 = norm4;
  const double d1 = norm2 * norm2 - norm1 * norm1;
  const double d2 = norm4 * norm4 - norm2 * norm2;
  rep.q = (d1 != 0.0) ? d2 / d1 : std::numeric_limits<double>::infinity();
  if (rep.q >= divergent_min)
    rep.verdict = GrowthVerdict::divergent;
  else if (rep.q <= convergent_max)
    rep.verdict = GrowthVerdict::convergent;
  return rep;
}

// Smoothly windowed weighted norm: h * sum chi(|x|/ell) <x>^{2r} u^2 over one
// side or both. The cutoff is 1 up to ell and vanishes beyond 2*ell, so a
// window triple (ell, 2ell, 4ell) must satisfy 8*ell <= L.
inline double windowed_weighted_norm(const Field& f, double r, double ell,
                                     TailSide side = TailSide::both) {
  const auto& x = f.grid().x();
  double s = 0.0;
  for (int j = 0; j < f.n(); ++j) {
    if (side == TailSide::left && x[j] >= 0.0) continue;
    if (side == TailSide::right && x[j] <= 0.0) continue;
    const double c = cutoff_chi(x[j] / ell);
    if (c == 0.0) continue;
    const double wv = std::exp(r * 0.5 * std::log1p(x[j] * x[j]));
    s += c * wv * wv * f.values()[j] * f.values()[j];
  }
  return std::sqrt(f.h() * s);
}

}  // namespace dgbo
