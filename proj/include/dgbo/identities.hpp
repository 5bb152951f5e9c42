#pragma once

// Exact commutator identities between the coordinate weights x, x^2 and the
// fractional dispersive operators, validated on interior-masked grids; the
// closed-form xi-derivative expansions of the free evolution in Fourier
// variables, validated against finite differences; and boundedness probes
// for the commutator estimates used by the weighted well-posedness theory.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgbo/operators.hpp"
#include "dgbo/random.hpp"
#include "dgbo/stein.hpp"
#include "dgbo/weights.hpp"

namespace dgbo {

struct IdentityReport {
  std::string name;
  double lhs_norm = 0.0;
  double residual_norm = 0.0;
  double relative_residual = 0.0;
  int n = 0;
  double L = 0.0;
};

namespace detail {

// Multiplication by x and x^2 is meaningful only away from the periodic
// seam, so the field must effectively live in the middle half of the box.
inline void require_interior_support(const Field& f, const char* who) {
  const auto& x = f.grid().x();
  const double half = 0.5 * f.grid().L();
  double outer = 0.0;
  for (int j = 0; j < f.n(); ++j)
    if (std::abs(x[j]) > half)
      outer = std::max(outer, std::abs(f.values()[j]));
  if (outer > 1e-12 * std::max(f.max_abs(), 1e-300))
    throw std::invalid_argument(std::string(who) +
                                ": field is not supported in |x| <= L/2 "
                                "(weighted identities need a seam margin)");
}

inline IdentityReport masked_report(const std::string& name, const Field& lhs,
                                    const Field& rhs) {
  const double radius = 0.8 * lhs.grid().L();
  IdentityReport rep;
  rep.name = name;
  rep.n = lhs.n();
  rep.L = lhs.grid().L();
  rep.lhs_norm = interior_l2(lhs, radius);
  rep.residual_norm = interior_l2_distance(lhs, rhs, radius);
  rep.relative_residual = rep.residual_norm / std::max(rep.lhs_norm, 1e-300);
  return rep;
}

}  // namespace detail

// x D^{1+a} dx f = -(2+a) D^{1+a} f + D^{1+a} dx (x f)
inline IdentityReport check_weight1_identity(const Field& f,
                                             const DispersionParams& p) {
  detail::require_interior_support(f, "check_weight1_identity");
  const double s = 1.0 + p.a;
  const Field lhs =
      coordinate_multiply(homogeneous_derivative(derivative(f, 1), s));
  const Field rhs =
      add(homogeneous_derivative(f, s),
          homogeneous_derivative(derivative(coordinate_multiply(f), 1), s),
          -(2.0 + p.a), 1.0);
  return detail::masked_report("weight1_derivative", lhs, rhs);
}

// x D^{1+a} f = D^{1+a}(x f) - (1+a) D^a H f
inline IdentityReport check_weight1_noderivative_identity(
    const Field& f, const DispersionParams& p) {
  detail::require_interior_support(f, "check_weight1_noderivative_identity");
  const double s = 1.0 + p.a;
  const Field lhs = coordinate_multiply(homogeneous_derivative(f, s));
  const Field rhs =
      add(homogeneous_derivative(coordinate_multiply(f), s),
          homogeneous_derivative(hilbert_transform(f), p.a), 1.0,
          -(1.0 + p.a));
  return detail::masked_report("weight1", lhs, rhs);
}

// The two x^2 identities:
//   x^2 D^{1+a} dx f = (2+a)(1+a) D^a H f - 2(2+a) D^{1+a}(x f)
//                      + D^{1+a} dx (x^2 f)
//   x^2 D^{1+a} f    = -(1+a) a D^{a-1} f - 2(1+a) D^a H (x f)
//                      + D^{1+a}(x^2 f)
// The second involves D^{a-1}, singular at the zero mode, so it requires
// mean-zero data.
inline std::pair<IdentityReport, IdentityReport> check_weight2_identities(
    const Field& f, const DispersionParams& p) {
  detail::require_interior_support(f, "check_weight2_identities");
  const double s = 1.0 + p.a;
  const Field xf = coordinate_multiply(f);
  const Field xxf = coordinate_multiply(xf);

  const Field lhs1 =
      coordinate_multiply(coordinate_multiply(
          homogeneous_derivative(derivative(f, 1), s)));
  const Field rhs1 = add(
      add(homogeneous_derivative(hilbert_transform(f), p.a),
          homogeneous_derivative(xf, s), (2.0 + p.a) * (1.0 + p.a),
          -2.0 * (2.0 + p.a)),
      homogeneous_derivative(derivative(xxf, 1), s), 1.0, 1.0);
  const IdentityReport rep1 =
      detail::masked_report("weight2_derivative", lhs1, rhs1);

  double l1 = 0.0;
  for (double v : f.values()) l1 += std::abs(v);
  l1 *= f.h();
  if (std::abs(f.spectrum()[0]) > 1e-10 * std::max(l1, 1e-300))
    throw std::invalid_argument(
        "check_weight2_identities: the D^{a-1} form needs mean-zero data "
        "(symbol singular at k = 0)");

  const Field lhs2 =
      coordinate_multiply(coordinate_multiply(homogeneous_derivative(f, s)));
  const Field dm1 = (p.a == 1.0)
                        ? f
                        : homogeneous_derivative_meanzero(f, p.a - 1.0);
  const Field rhs2 =
      add(add(dm1, homogeneous_derivative(hilbert_transform(xf), p.a),
              -(1.0 + p.a) * p.a, -2.0 * (1.0 + p.a)),
          homogeneous_derivative(xxf, s), 1.0, 1.0);
  const IdentityReport rep2 =
      detail::masked_report("weight2_meanzero", lhs2, rhs2);
  return {rep1, rep2};
}

// Commutation of x - (2+a) t D^{1+a} with the free propagator:
// W(t)(x u0) = (x - (2+a) t D^{1+a}) W(t) u0.
inline IdentityReport gamma_commutation_check(const Field& u0, double t,
                                              const DispersionParams& p) {
  detail::require_interior_support(u0, "gamma_commutation_check");
  const Field lhs = linear_propagator(coordinate_multiply(u0), t, p);
  const Field w = linear_propagator(u0, t, p);
  const Field rhs = add(coordinate_multiply(w),
                        homogeneous_derivative(w, 1.0 + p.a), 1.0,
                        -(2.0 + p.a) * t);
  return detail::masked_report("gamma_commutation", lhs, rhs);
}

// ---- xi-derivative expansions of the free evolution ------------------------

// One term of d^j/dxi^j [ e^{-it phi(xi)} u0_hat(xi) ] divided by the common
// phase factor: (-it)^{t_power} * coeff * |xi|^{xi_power} * sgn(xi)^{sign_power}
// * u0_hat^{(data_order)}(xi), with phi(xi) = |xi|^{1+a} xi.
struct SymbolDerivativeTerm {
  int t_power = 0;
  double coeff = 0.0;
  double xi_power = 0.0;
  int sign_power = 0;  // 0 or 1
  int data_order = 0;  // m in u0_hat^{(m)}
};

struct SymbolDerivativeExpansion {
  int order = 0;  // j in 1..4
  double a = 0.0;
  std::vector<SymbolDerivativeTerm> terms;
};

inline SymbolDerivativeExpansion make_fj_expansion(int j, double a) {
  if (j < 1 || j > 4)
    throw std::invalid_argument("make_fj_expansion: order must be 1..4");
  // phi-derivative magnitudes: phi^(m) = Cm |xi|^{2+a-m} (times sgn for even m)
  const double C1 = 2.0 + a;
  const double C2 = (2.0 + a) * (1.0 + a);
  const double C3 = (2.0 + a) * (1.0 + a) * a;
  const double C4 = (2.0 + a) * (1.0 + a) * a * (a - 1.0);

  // E_i = (d^i/dxi^i e^{-it phi}) / e^{-it phi} via Faa di Bruno.
  using Term = SymbolDerivativeTerm;
  std::vector<std::vector<Term>> E(5);
  E[0] = {{0, 1.0, 0.0, 0, 0}};
  E[1] = {{1, C1, 1.0 + a, 0, 0}};
  E[2] = {{1, C2, a, 1, 0}, {2, C1 * C1, 2.0 + 2.0 * a, 0, 0}};
  E[3] = {{1, C3, a - 1.0, 0, 0},
          {2, 3.0 * C2 * C1, 1.0 + 2.0 * a, 1, 0},
          {3, C1 * C1 * C1, 3.0 + 3.0 * a, 0, 0}};
  E[4] = {{1, C4, a - 2.0, 1, 0},
          {2, 4.0 * C3 * C1, 2.0 * a, 0, 0},
          {2, 3.0 * C2 * C2, 2.0 * a, 0, 0},
          {3, 6.0 * C2 * C1 * C1, 2.0 + 3.0 * a, 1, 0},
          {4, C1 * C1 * C1 * C1, 4.0 + 4.0 * a, 0, 0}};

  const double binom[5][5] = {{1, 0, 0, 0, 0},
                              {1, 1, 0, 0, 0},
                              {1, 2, 1, 0, 0},
                              {1, 3, 3, 1, 0},
                              {1, 4, 6, 4, 1}};
  SymbolDerivativeExpansion ex;
  ex.order = j;
  ex.a = a;
  for (int i = 0; i <= j; ++i)
    for (Term t : E[i]) {
      t.coeff *= binom[j][i];
      t.data_order = j - i;
      if (t.coeff != 0.0) ex.terms.push_back(t);
    }
  return ex;
}

// m-th xi-derivative of the transform of u0 at an arbitrary frequency:
// u0_hat^{(m)}(xi) = h * sum_j (-i x_j)^m u0(x_j) e^{-i xi x_j}.
inline cdouble spectrum_derivative_at(const Field& u0, double xi, int m) {
  const auto& x = u0.grid().x();
  const auto& u = u0.values();
  cdouble acc(0.0, 0.0);
  for (int j = 0; j < u0.n(); ++j) {
    cdouble w = std::polar(1.0, -xi * x[j]);
    for (int q = 0; q < m; ++q) w *= cdouble(0.0, -x[j]);
    acc += w * u[j];
  }
  return u0.h() * acc;
}

inline cdouble evaluate_fj(const SymbolDerivativeExpansion& ex,
                           const Field& u0, double t, double xi) {
  const double phi = std::pow(std::abs(xi), 1.0 + ex.a) * xi;
  const cdouble mit(0.0, -t);
  cdouble sum(0.0, 0.0);
  for (const auto& term : ex.terms) {
    cdouble c(term.coeff, 0.0);
    for (int q = 0; q < term.t_power; ++q) c *= mit;
    double xp = std::pow(std::abs(xi), term.xi_power);
    if (term.sign_power) xp *= sgn(xi);
    sum += c * xp * spectrum_derivative_at(u0, xi, term.data_order);
  }
  return std::polar(1.0, -t * phi) * sum;
}

namespace detail {

// Finite-difference oracle for d^j/dxi^j of G(xi) = e^{-it phi} u0_hat(xi):
// centered stencils with two Richardson levels; the step shrinks with the
// local phase scale so the oscillation stays resolved.
inline cdouble fj_fd_oracle(const Field& u0, double t, double a, int j,
                            double xi) {
  auto G = [&](double z) {
    const double phi = std::pow(std::abs(z), 1.0 + a) * z;
    return std::polar(1.0, -t * phi) * spectrum_derivative_at(u0, z, 0);
  };
  const double d0 = std::min(
      {0.05, std::abs(xi) / 5.0,
       0.25 / (1.0 + t * (2.0 + a) * std::pow(std::abs(xi), 1.0 + a))});
  auto stencil = [&](double d) -> cdouble {
    const cdouble g2p = G(xi + 2 * d), g1p = G(xi + d), g1m = G(xi - d),
                  g2m = G(xi - 2 * d);
    switch (j) {
      case 1:
        return (-g2p + 8.0 * g1p - 8.0 * g1m + g2m) / (12.0 * d);
      case 2:
        return (-g2p + 16.0 * g1p - 30.0 * G(xi) + 16.0 * g1m - g2m) /
               (12.0 * d * d);
      case 3:
        return (g2p - 2.0 * g1p + 2.0 * g1m - g2m) / (2.0 * d * d * d);
      default:
        return (g2p - 4.0 * g1p + 6.0 * G(xi) - 4.0 * g1m + g2m) /
               (d * d * d * d);
    }
  };
  // two Richardson levels: kill the leading error order p of the stencil,
  // then the next one (p + 2; centered stencils have only even orders)
  const double p = (j <= 2) ? 16.0 : 4.0;
  const cdouble v1 = stencil(d0), v2 = stencil(0.5 * d0),
                v3 = stencil(0.25 * d0);
  const cdouble w1 = (p * v2 - v1) / (p - 1.0);
  const cdouble w2 = (p * v3 - v2) / (p - 1.0);
  return (4.0 * p * w2 - w1) / (4.0 * p - 1.0);
}

}  // namespace detail

// Default evaluation set: both signs of a log-spaced sweep, away from the
// origin where the symbol derivatives are singular.
inline std::vector<double> fj_default_xi_set() {
  std::vector<double> xs;
  for (int i = 0; i < 25; ++i) {
    const double v = 0.1 * std::pow(100.0, i / 24.0);
    xs.push_back(v);
    xs.push_back(-v);
  }
  return xs;
}

inline IdentityReport verify_Fj_expansion(
    const Field& u0, double t, const DispersionParams& p, int j,
    const std::vector<double>& xi_set = fj_default_xi_set()) {
  if (j < 1 || j > 4)
    throw std::invalid_argument("verify_Fj_expansion: order must be 1..4");
  const auto ex = make_fj_expansion(j, p.a);
  double max_abs = 0.0, max_rel = 0.0;
  for (double xi : xi_set) {
    if (std::abs(xi) < 0.05)
      throw std::invalid_argument(
          "verify_Fj_expansion: |xi| < 0.05 is not finite-difference "
          "resolvable");
    const cdouble closed = evaluate_fj(ex, u0, t, xi);
    const cdouble fd = detail::fj_fd_oracle(u0, t, p.a, j, xi);
    max_abs = std::max(max_abs, std::abs(closed));
    max_rel = std::max(max_rel, std::abs(closed - fd) /
                                    std::max(std::abs(closed), 1e-300));
  }
  IdentityReport rep;
  rep.name = "fj_expansion_j" + std::to_string(j);
  rep.n = u0.n();
  rep.L = u0.grid().L();
  rep.lhs_norm = max_abs;
  rep.relative_residual = max_rel;
  rep.residual_norm = max_rel * max_abs;  // worst mismatch at profile scale
  return rep;
}

// ---- boundedness probes -----------------------------------------------------

enum class ProbeKind {
  hilbert_commutator,             // [H, psi],            vs sup|psi'| ||f||
  derivative_hilbert_commutator,  // dx [H, psi] dx,      vs sup|psi''| ||f||
  fractional_commutator,   // D^{1/4}[D^{1/2},psi]D^{1/4} vs ||J^{3/4}psi'|| ||f||
  bessel_commutator,       // [J^{1/2}, psi] f            vs ||(psi')^|| _L1 ||f||
  bessel_product,          // J^{1/2}(fg) - f J^{1/2} g   vs ||(f')^||_L1 ||g||
  weighted_bessel_ratio,   // ||J^{1/2}(psi f)|| / ||J^{1/2} f||
  phase_stein_bound        // Stein derivative of the dispersive phase symbol
};

struct ProbeReport {
  ProbeKind kind{};
  int trials = 0;
  double max_ratio = 0.0;
  std::vector<int> grid_sizes;       // refinement levels examined
  std::vector<double> per_grid_max;  // max ratio at each level
  double refinement_spread = 0.0;    // (max-min)/max across levels
  bool amplitude_applicable = false;
  bool amplitude_scaling_exact = false;
};

namespace detail {

// `noise_floor` absorbs FFT round-trip noise in numerators that vanish
// analytically (constant multipliers): below it the numerator counts as zero.
inline double safe_ratio(double num, double den, double noise_floor = 0.0) {
  if (num <= noise_floor) num = 0.0;
  if (den <= 0.0)
    return num <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

// ||g_hat||_{L1(dxi)} ~ dk * sum |g_hat(k_m)|
inline double spectral_l1(const Field& g) {
  double s = 0.0;
  for (const auto& c : g.spectrum()) s += std::abs(c);
  return s * M_PI / g.grid().L();
}

inline double probe_ratio(ProbeKind kind, const Field& psi, const Field& f,
                          const Field& g, double sup_psi1, double sup_psi2,
                          double bessel_psi1_l2, double psi1_spec_l1) {
  const double floor = 1e-10 * f.l2_norm();
  switch (kind) {
    case ProbeKind::hilbert_commutator: {
      const Field comm = add(hilbert_transform(pointwise_multiply(psi, f)),
                             pointwise_multiply(psi, hilbert_transform(f)),
                             1.0, -1.0);
      return safe_ratio(comm.l2_norm(), sup_psi1 * f.l2_norm(), floor);
    }
    case ProbeKind::derivative_hilbert_commutator: {
      const Field fx = derivative(f, 1);
      const Field comm = add(hilbert_transform(pointwise_multiply(psi, fx)),
                             pointwise_multiply(psi, hilbert_transform(fx)),
                             1.0, -1.0);
      return safe_ratio(derivative(comm, 1).l2_norm(),
                        sup_psi2 * f.l2_norm(), floor);
    }
    case ProbeKind::fractional_commutator: {
      const Field inner = homogeneous_derivative(f, 0.25);
      const Field comm =
          add(homogeneous_derivative(pointwise_multiply(psi, inner), 0.5),
              pointwise_multiply(psi, homogeneous_derivative(inner, 0.5)),
              1.0, -1.0);
      return safe_ratio(homogeneous_derivative(comm, 0.25).l2_norm(),
                        bessel_psi1_l2 * f.l2_norm(), floor);
    }
    case ProbeKind::bessel_commutator: {
      const Field comm = add(bessel_derivative(pointwise_multiply(psi, f), 0.5),
                             pointwise_multiply(psi, bessel_derivative(f, 0.5)),
                             1.0, -1.0);
      return safe_ratio(comm.l2_norm(), psi1_spec_l1 * f.l2_norm(), floor);
    }
    case ProbeKind::bessel_product: {
      const Field lhs =
          add(bessel_derivative(pointwise_multiply(f, g), 0.5),
              pointwise_multiply(f, bessel_derivative(g, 0.5)), 1.0, -1.0);
      return safe_ratio(lhs.l2_norm(),
                        spectral_l1(derivative(f, 1)) * g.l2_norm());
    }
    case ProbeKind::weighted_bessel_ratio:
      return safe_ratio(
          bessel_derivative(pointwise_multiply(psi, f), 0.5).l2_norm(),
          bessel_derivative(f, 0.5).l2_norm());
    default:
      throw std::logic_error("probe_ratio: not a field probe");
  }
}

}  // namespace detail

// Max lhs/rhs ratio over randomized band-limited trials, shared across grid
// refinement n in {512, 1024, 2048} on L = 30 so the same continuum fields
// are re-examined at each resolution. The multiplier is the truncated weight
// <x>_N^r of `psi`; r = 0 makes it constant (all commutators vanish). The
// phase_stein_bound probe is deterministic: its ratio is examined on
// t in {0.1, 1, 10} x |x| in {0, 1, 5, 20, 50} and its refinement axis is
// the quadrature segmentation.
inline ProbeReport probe_estimate(ProbeKind kind, int trials,
                                  unsigned long long seed = 20260301ULL,
                                  const WeightSpec& psi_spec = WeightSpec(0.8,
                                                                          7.5),
                                  int p = 2, int q = 2) {
  if (p != 2 || q != 2)
    throw std::invalid_argument("probe_estimate: only p = q = 2 is supported");
  if (trials < 1)
    throw std::invalid_argument("probe_estimate: need at least one trial");

  ProbeReport rep;
  rep.kind = kind;
  rep.trials = trials;

  if (kind == ProbeKind::phase_stein_bound) {
    const double a = 0.5, b = 0.5;
    const std::vector<double> ts = {0.1, 1.0, 10.0};
    const std::vector<double> xs = {0.0, 1.0, 5.0, 20.0, 50.0};
    rep.grid_sizes = {120, 240};
    for (int nseg : rep.grid_sizes) {
      double worst = 0.0;
      for (double t : ts)
        for (double x : xs) {
          const double num =
              std::sqrt(std::max(stein_phase_sq(t, a, b, x, nseg).value, 0.0));
          const double den =
              std::pow(t, b / (2.0 + a)) +
              std::pow(t, b) * std::pow(std::abs(x), (1.0 + a) * b);
          worst = std::max(worst, num / den);
        }
      rep.per_grid_max.push_back(worst);
      rep.max_ratio = std::max(rep.max_ratio, worst);
    }
    const auto [mn, mx] = std::minmax_element(rep.per_grid_max.begin(),
                                              rep.per_grid_max.end());
    rep.refinement_spread = (*mx - *mn) / *mx;
    return rep;
  }

  const double L = 30.0;
  rep.grid_sizes = {512, 1024, 2048};
  rep.amplitude_applicable = true;

  // denominator constants of the multiplier (grid-independent)
  double sup_psi1 = 0.0, sup_psi2 = 0.0;
  if (psi_spec.r > 0.0) {
    const double x_hi = std::isfinite(psi_spec.N) ? 3.0 * psi_spec.N : L;
    const int ns = 60001;
    for (int i = 0; i < ns; ++i) {
      const double x = x_hi * i / (ns - 1);
      sup_psi1 = std::max(sup_psi1, std::abs(weight_derivative(x, psi_spec)));
      sup_psi2 = std::max(sup_psi2,
                          std::abs(weight_second_derivative(x, psi_spec)));
    }
  }

  std::vector<GridPtr> grids;
  std::vector<Field> psis;
  std::vector<double> bessel_psi1_l2, psi1_spec_l1;
  for (int n : rep.grid_sizes) {
    grids.push_back(make_grid(n, L));
    psis.push_back(Field::sample(
        grids.back(), [&](double x) { return weight_value(x, psi_spec); }));
    const Field psi_x = derivative(psis.back(), 1);
    bessel_psi1_l2.push_back(bessel_derivative(psi_x, 0.75).l2_norm());
    psi1_spec_l1.push_back(detail::spectral_l1(psi_x));
  }

  Rng rng(seed);
  rep.per_grid_max.assign(rep.grid_sizes.size(), 0.0);
  TrigCoeffs first_f, first_g;
  for (int trial = 0; trial < trials; ++trial) {
    const TrigCoeffs cf = random_trig_coeffs(rng);
    const TrigCoeffs cg = random_trig_coeffs(rng);
    if (trial == 0) {
      first_f = cf;
      first_g = cg;
    }
    for (size_t gi = 0; gi < grids.size(); ++gi) {
      const Field f = trig_field(grids[gi], cf);
      const Field g = trig_field(grids[gi], cg);
      const double r =
          detail::probe_ratio(kind, psis[gi], f, g, sup_psi1, sup_psi2,
                              bessel_psi1_l2[gi], psi1_spec_l1[gi]);
      rep.per_grid_max[gi] = std::max(rep.per_grid_max[gi], r);
    }
  }
  const auto [mn, mx] =
      std::minmax_element(rep.per_grid_max.begin(), rep.per_grid_max.end());
  rep.max_ratio = *mx;
  rep.refinement_spread = (*mx > 0.0) ? (*mx - *mn) / *mx : 0.0;

  // both sides are homogeneous of degree one in the data, so scaling by a
  // power of two must reproduce the ratio bit for bit
  {
    const size_t gi = grids.size() - 1;
    const Field f = trig_field(grids[gi], first_f);
    const Field g = trig_field(grids[gi], first_g);
    const double base =
        detail::probe_ratio(kind, psis[gi], f, g, sup_psi1, sup_psi2,
                            bessel_psi1_l2[gi], psi1_spec_l1[gi]);
    const double scaled =
        detail::probe_ratio(kind, psis[gi], scale(f, 4.0), scale(g, 4.0),
                            sup_psi1, sup_psi2, bessel_psi1_l2[gi],
                            psi1_spec_l1[gi]);
    rep.amplitude_scaling_exact = (base == scaled);
  }
  return rep;
}

}  // namespace dgbo
