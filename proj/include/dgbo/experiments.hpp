#pragma once

// Experiment drivers. Each run_* function performs one desk-scale study
// (persistence of weighted norms, decay dichotomies, momentum roots, the
// estimate probe suite, the Stein table, ground states), returns a plain
// report struct, and run_experiment() dispatches on the configured id,
// writes CSV/JSON artifacts and maps scientific verdicts to exit codes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dgbo/evolution.hpp"
#include "dgbo/ground_state.hpp"
#include "dgbo/identities.hpp"
#include "dgbo/io.hpp"
#include "dgbo/operators.hpp"
#include "dgbo/stein.hpp"
#include "dgbo/weights.hpp"

namespace dgbo {

namespace detail {

// Full-box squared weighted norm ||<x>^r u||_2^2. The box-doubling increment
// ratio of these decides decay dichotomies.
inline double full_box_weighted_sq(const Field& f, double r) {
  const auto& x = f.grid().x();
  double s = 0.0;
  for (int j = 0; j < f.n(); ++j) {
    const double w = std::exp(r * std::log1p(x[j] * x[j]));  // <x>^{2r}
    s += w * f.values()[j] * f.values()[j];
  }
  return f.h() * s;
}

// Exact free evolution of the configured data on an (n, L) grid.
inline Field linear_state(const DataSpec& data, const DispersionParams& p,
                          int n, double L, double t) {
  auto grid = make_grid(n, L);
  Field u0 = make_initial_data(grid, data);
  return linear_propagator(u0, t, p);
}

inline double lerp_series(const std::vector<double>& ts,
                          const std::vector<double>& vs, double t) {
  if (ts.empty()) throw std::invalid_argument("lerp_series: empty series");
  if (t <= ts.front()) return vs.front();
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] >= t) {
      const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
      return vs[i - 1] + w * (vs[i] - vs[i - 1]);
    }
  }
  return vs.back();
}

}  // namespace detail

// ---- persistence -----------------------------------------------------------

struct PersistenceCase {
  double s = 0.0;
  double r = 0.0;
  std::vector<double> sup_sobolev;  // sup_t ||J^s u(t)||_2 per box
  std::vector<double> sup_weight;   // sup_t ||<x>^r u(t)||_2 per box
  GrowthReport growth;              // of the sup weighted norms across boxes
  bool bounded = false;
};

struct PersistenceReport {
  std::vector<double> boxes;
  std::vector<PersistenceCase> cases;
  bool all_bounded = false;
};

// Evolves the data on a box triple (L, 2L, 4L) at fixed grid spacing and
// tracks sup_t of the weighted-Sobolev norm components for the admissible
// (s, r) pairs (s, r) = (1+a, 1) and (2(1+a), 2). Boundedness means the sup
// norms do not keep growing as the box is enlarged.
inline PersistenceReport run_persistence(const ExperimentConfig& cfg) {
  PersistenceReport rep;
  const double a = cfg.params.a;
  const std::array<std::pair<double, double>, 2> pairs = {
      {{1.0 + a, 1.0}, {2.0 * (1.0 + a), 2.0}}};
  for (const auto& [s, r] : pairs) {
    PersistenceCase c;
    c.s = s;
    c.r = r;
    rep.cases.push_back(c);
  }
  for (int b = 0; b < 3; ++b) {
    const double L = cfg.box * (1 << b);
    const int n = cfg.n * (1 << b);
    auto grid = make_grid(n, L);
    Field u0 = make_initial_data(grid, cfg.data);
    EvolutionConfig ev = cfg.evolution;
    ev.params = cfg.params;
    Trajectory traj = evolve(u0, ev);
    if (traj.aborted)
      throw std::runtime_error("run_persistence: evolution aborted at t = " +
                               std::to_string(traj.abort_time));
    rep.boxes.push_back(L);
    for (auto& pc : rep.cases) {
      double ss = 0.0, sw = 0.0;
      for (std::size_t i = 0; i < traj.snapshot_times.size(); ++i) {
        const Field u = traj.field_at(static_cast<int>(i));
        const ZNorm z = z_norm(u, pc.s, pc.r);
        ss = std::max(ss, z.sobolev);
        sw = std::max(sw, z.weight);
      }
      pc.sup_sobolev.push_back(ss);
      pc.sup_weight.push_back(sw);
    }
  }
  rep.all_bounded = true;
  for (auto& pc : rep.cases) {
    const double w1 = pc.sup_weight[0], w2 = pc.sup_weight[1],
                 w4 = pc.sup_weight[2];
    const double scale = std::max({w1 * w1, w2 * w2, w4 * w4, 1e-300});
    if (std::abs(w2 * w2 - w1 * w1) <= 1e-12 * scale &&
        std::abs(w4 * w4 - w2 * w2) <= 1e-12 * scale) {
      // flat across boxes (zero data, or fully interior mass)
      pc.growth.norm1 = w1;
      pc.growth.norm2 = w2;
      pc.growth.norm4 = w4;
      pc.growth.q = 0.0;
      pc.growth.verdict = GrowthVerdict::convergent;
    } else {
      pc.growth = box_growth_verdict(w1, w2, w4);
    }
    pc.bounded = pc.growth.verdict == GrowthVerdict::convergent;
    rep.all_bounded = rep.all_bounded && pc.bounded;
  }
  return rep;
}

// ---- decay dichotomies -------------------------------------------------------

struct DichotomyCase {
  double r = 0.0;
  GrowthReport growth;
  GrowthVerdict expected = GrowthVerdict::indeterminate;
  bool matches = false;
};

struct DichotomyReport {
  std::string data_kind;
  double threshold = 0.0;  // decay-weight threshold of the data class
  DichotomyCase below, above;
  TailFit tail_linear;     // |u(t)| slope under the free flow
  TailFit tail_nonlinear;  // same under the small-amplitude nonlinear flow
  bool verdicts_ok = false;
  bool tail_in_band = false;
};

namespace detail {

inline DichotomyReport dichotomy_scan(const ExperimentConfig& cfg,
                                      double threshold) {
  DichotomyReport rep;
  rep.data_kind = cfg.data.kind;
  rep.threshold = threshold;
  const double t = cfg.evolution.t_end;
  const double rlo = threshold - 0.2, rhi = threshold + 0.2;

  // Full-box weighted norms on a box triple at fixed spacing. Below the
  // threshold the box increments die out; above they keep growing.
  std::array<std::array<double, 3>, 2> n2{};
  for (int b = 0; b < 3; ++b) {
    const Field u = linear_state(cfg.data, cfg.params, cfg.n * (1 << b),
                                 cfg.box * (1 << b), t);
    n2[0][b] = full_box_weighted_sq(u, rlo);
    n2[1][b] = full_box_weighted_sq(u, rhi);
  }
  auto decide = [&](int i, double r, GrowthVerdict expect) {
    DichotomyCase c;
    c.r = r;
    c.growth = box_growth_verdict(std::sqrt(n2[i][0]), std::sqrt(n2[i][1]),
                                  std::sqrt(n2[i][2]));
    c.expected = expect;
    c.matches = c.growth.verdict == expect;
    return c;
  };
  rep.below = decide(0, rlo, GrowthVerdict::convergent);
  rep.above = decide(1, rhi, GrowthVerdict::divergent);

  // Tail slopes on a wide fit box, under the free flow and under the
  // nonlinear flow at a tenth of the amplitude.
  const int n_fit = 16384;
  const double L_fit = 250.0;
  const Field u_lin = linear_state(cfg.data, cfg.params, n_fit, L_fit, t);
  rep.tail_linear = tail_exponent(u_lin, 30.0, 150.0, 10);
  {
    auto grid = make_grid(n_fit, L_fit);
    DataSpec small = cfg.data;
    small.amplitude = 0.1 * cfg.data.amplitude;
    Field u0 = make_initial_data(grid, small);
    EvolutionConfig ev = cfg.evolution;
    ev.params = cfg.params;
    const Field u_nl = evolve_to_time(u0, ev, t);
    rep.tail_nonlinear = tail_exponent(u_nl, 30.0, 150.0, 10);
  }
  rep.verdicts_ok = rep.below.matches && rep.above.matches;
  // expected slope: -(threshold + 1/2), i.e. -(3+a) mean case, -(4+a)
  // mean-zero case
  const double slope_exp = -(threshold + 0.5);
  const double band = (threshold < 3.25) ? 0.15 : 0.20;
  rep.tail_in_band = std::abs(rep.tail_linear.slope - slope_exp) <= band;
  return rep;
}

}  // namespace detail

// Dichotomy around the nonzero-mean decay threshold 5/2 + a.
inline DichotomyReport run_mean_threshold(const ExperimentConfig& cfg) {
  {
    auto grid = make_grid(cfg.n, cfg.box);
    const Field u0 = make_initial_data(grid, cfg.data);
    if (zdot_member(u0, 1e-8))
      throw std::invalid_argument("run_mean_threshold: data mean is zero");
  }
  return detail::dichotomy_scan(cfg, 2.5 + cfg.params.a);
}

// ---- momentum root experiments ------------------------------------------------

struct TStarReport {
  double M0 = 0.0;
  double I2_0 = 0.0;
  double t_star_formula = 0.0;   // -4 M0 / I2_0
  double t_star_measured = 0.0;  // nonzero root of c(t) = integral of M
  double relative_gap = 0.0;
  double m_linearity_residual = 0.0;  // max |M(t) - (M0 + t I2/2)|
  double c_closed_form_gap = 0.0;     // max |c(t) - t (M0 + t I2/4)|
  bool degenerate = false;            // M0 ~ 0: the only root is t = 0
  bool used_quadratic_fit = false;
  GrowthReport growth_at_root;  // left-side window verdicts at the root
  GrowthReport growth_at_half;  // and at half of it
  bool improved_decay_at_root = false;
  ConservedLedger ledger;
  std::vector<double> c;  // cumulative integral of M at the ledger times
};

// Evolves mean-zero data with a nonzero first moment, measures
// M(t) = integral of x u, integrates it to c(t), and root-finds the nonzero
// zero of c. Around the root the weighted left-tail norm drops a decay tier:
// divergent growth verdict at root/2, convergent at the root.
inline TStarReport run_t_star(const ExperimentConfig& cfg) {
  auto grid = make_grid(cfg.n, cfg.box);
  Field u0 = make_initial_data(grid, cfg.data);
  if (!zdot_member(u0, 1e-8))
    throw std::invalid_argument("run_t_star: data must have zero mean");
  EvolutionConfig ev = cfg.evolution;
  ev.params = cfg.params;
  Trajectory traj = evolve(u0, ev);
  if (traj.aborted)
    throw std::runtime_error("run_t_star: evolution aborted at t = " +
                             std::to_string(traj.abort_time));
  const ConservedLedger& led = traj.ledger;

  TStarReport rep;
  rep.ledger = led;
  rep.M0 = led.M.front();
  rep.I2_0 = led.I2.front();

  const std::size_t m = led.times.size();
  rep.c.assign(m, 0.0);
  double mres = 0.0, cgap = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = led.times[i];
    mres = std::max(mres,
                    std::abs(led.M[i] - (rep.M0 + 0.5 * t * rep.I2_0)));
    if (i > 0)
      rep.c[i] = rep.c[i - 1] + 0.5 * (led.M[i] + led.M[i - 1]) *
                                    (led.times[i] - led.times[i - 1]);
    cgap = std::max(cgap,
                    std::abs(rep.c[i] - t * (rep.M0 + 0.25 * t * rep.I2_0)));
  }
  rep.m_linearity_residual = mres;
  rep.c_closed_form_gap = cgap;

  if (std::abs(rep.M0) <= 1e-10 * std::max(1.0, rep.I2_0)) {
    // M(0) = 0 regime: c(t) = t^2 I2/4 has only the root t = 0
    rep.degenerate = true;
    return rep;
  }
  rep.t_star_formula = -4.0 * rep.M0 / rep.I2_0;

  // c(t) is quadratic with c(0) = 0; least-squares fit on {t, t^2} and take
  // the nonzero root. Fall back to the first sign change if the fit is poor.
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 1; i < m; ++i) {
    const double t = led.times[i], t2 = t * t;
    s11 += t * t;
    s12 += t * t2;
    s22 += t2 * t2;
    b1 += t * rep.c[i];
    b2 += t2 * rep.c[i];
  }
  const double det = s11 * s22 - s12 * s12;
  double root = 0.0;
  if (det > 0.0) {
    const double alpha = (b1 * s22 - b2 * s12) / det;
    const double beta = (s11 * b2 - s12 * b1) / det;
    if (beta != 0.0) {
      const double cand = -alpha / beta;
      double fit_res = 0.0, cmax = 0.0;
      for (std::size_t i = 1; i < m; ++i) {
        const double t = led.times[i];
        fit_res = std::max(
            fit_res, std::abs(rep.c[i] - (alpha * t + beta * t * t)));
        cmax = std::max(cmax, std::abs(rep.c[i]));
      }
      if (cand > 0.0 && fit_res <= 1e-4 * std::max(cmax, 1e-300)) {
        root = cand;
        rep.used_quadratic_fit = true;
      }
    }
  }
  if (!rep.used_quadratic_fit) {
    for (std::size_t i = 1; i + 1 < m; ++i) {
      if (rep.c[i] != 0.0 && rep.c[i] * rep.c[i + 1] < 0.0) {
        root = led.times[i] - rep.c[i] * (led.times[i + 1] - led.times[i]) /
                                  (rep.c[i + 1] - rep.c[i]);
        break;
      }
    }
  }
  if (!(root > 0.0) || root > led.times.back() + 1e-12)
    throw std::runtime_error(
        "run_t_star: nonzero root of c(t) outside the simulated horizon");
  rep.t_star_measured = root;
  rep.relative_gap =
      std::abs(root - rep.t_star_formula) / std::abs(rep.t_star_formula);

  // Improved decay at the root: restart from the last stored snapshot before
  // the target time and finish with exact partial steps.
  auto state_at = [&](double T) {
    std::size_t i = 0;
    while (i + 1 < m && led.times[i + 1] <= T + 1e-12) ++i;
    Field ui = traj.field_at(static_cast<int>(i));
    const double rest = T - led.times[i];
    if (rest <= 1e-12) return ui;
    return evolve_to_time(ui, ev, rest);
  };
  const double rw = 3.7 + cfg.params.a;  // slightly above the decay cap
  const double ell = std::min(50.0, grid->L() / 8.0);
  auto left_verdict = [&](const Field& f) {
    return box_growth_verdict(
        windowed_weighted_norm(f, rw, ell, TailSide::left),
        windowed_weighted_norm(f, rw, 2.0 * ell, TailSide::left),
        windowed_weighted_norm(f, rw, 4.0 * ell, TailSide::left));
  };
  rep.growth_at_root = left_verdict(state_at(root));
  rep.growth_at_half = left_verdict(state_at(0.5 * root));
  rep.improved_decay_at_root =
      rep.growth_at_root.verdict == GrowthVerdict::convergent &&
      rep.growth_at_half.verdict == GrowthVerdict::divergent;
  return rep;
}

struct MomentumThresholdReport {
  DichotomyReport dichotomy;
  TStarReport root_mechanism;  // run on the dedicated root-scale data
};

// Dichotomy around the mean-zero decay threshold 7/2 + a, plus the
// coefficient mechanism: c(t) nonvanishing drives the divergent side, and
// the verdict flips at the nonzero root of c.
inline MomentumThresholdReport run_momentum_threshold(
    const ExperimentConfig& cfg);

struct TwoTimeMomentumReport {
  TStarReport base;
  double t_m = 0.0;      // root of M(t) = M0 + t I2/2
  double ratio = 0.0;    // t*_measured / t_m, 2 when M is linear in t
  double m_at_t_m = 0.0;                // interpolated ledger M at t_m
  double c_at_t_m = 0.0;                // measured c(t_m), stays nonzero
  double c_at_t_m_closed_form = 0.0;    // t_m M0 / 2
  bool still_divergent_at_half = false; // M = 0 alone does not flip growth
};

// M(t) crosses zero at t_m = -2 M0 / I2 while c(t) = integral of M is still
// nonzero there: the weighted norm keeps diverging at t_m and only flips to
// convergent at the later time 2 t_m where c vanishes.
inline TwoTimeMomentumReport run_two_time_momentum(
    const ExperimentConfig& cfg) {
  TwoTimeMomentumReport rep;
  rep.base = run_t_star(cfg);
  if (rep.base.degenerate) return rep;
  rep.t_m = -2.0 * rep.base.M0 / rep.base.I2_0;
  rep.ratio = rep.base.t_star_measured / rep.t_m;
  rep.m_at_t_m =
      detail::lerp_series(rep.base.ledger.times, rep.base.ledger.M, rep.t_m);
  rep.c_at_t_m = detail::lerp_series(rep.base.ledger.times, rep.base.c, rep.t_m);
  rep.c_at_t_m_closed_form = 0.5 * rep.t_m * rep.base.M0;
  rep.still_divergent_at_half =
      rep.base.growth_at_half.verdict == GrowthVerdict::divergent;
  return rep;
}

// ---- k-nonlinearity momentum law ----------------------------------------------

struct KMomentumReport {
  int k = 1;
  MomentumReport law;
  bool monotone_increasing = false;  // M strictly increasing over snapshots
  bool zero_data = false;
  ConservedLedger ledger;
};

inline KMomentumReport run_k_momentum(const ExperimentConfig& cfg) {
  auto grid = make_grid(cfg.n, cfg.box);
  Field u0 = make_initial_data(grid, cfg.data);
  KMomentumReport rep;
  rep.k = cfg.params.k_power;
  double umax = 0.0;
  for (double v : u0.values()) umax = std::max(umax, std::abs(v));
  rep.zero_data = (umax == 0.0);
  EvolutionConfig ev = cfg.evolution;
  ev.params = cfg.params;
  ev.store_fields = false;
  Trajectory traj = evolve(u0, ev);
  rep.law = momentum_law_residual(traj);
  rep.ledger = traj.ledger;
  rep.monotone_increasing = traj.ledger.M.size() > 1;
  for (std::size_t i = 1; i < traj.ledger.M.size(); ++i)
    if (!(traj.ledger.M[i] > traj.ledger.M[i - 1]))
      rep.monotone_increasing = false;
  return rep;
}

// ---- identity suite -------------------------------------------------------------

// Band-rich data for the weight identities: fifth derivative of a narrow
// Gaussian. Narrow enough that spectral truncation, not round-off, dominates
// the residual at n = 4096, L = 60, so refinement still shrinks it.
inline Field identity_suite_data(const GridPtr& grid, double w = 0.11) {
  return Field::sample(grid, [w](double x) {
    const double s = x / w;
    const double h5 = ((32.0 * s * s - 160.0) * s * s + 120.0) * s;
    return -h5 * std::exp(-s * s) / std::pow(w, 5);
  });
}

struct IdentitySuiteReport {
  double a = 0.0;
  int n = 0;
  double box = 0.0;
  std::vector<IdentityReport> weight_identities;  // the four x / x^2 forms
  std::vector<IdentityReport> expansions;         // F_1 .. F_4
};

inline IdentitySuiteReport run_identity_suite(double a, int n = 4096,
                                              double L = 60.0) {
  IdentitySuiteReport rep;
  rep.a = a;
  rep.n = n;
  rep.box = L;
  const DispersionParams p(a, 1);
  auto grid = make_grid(n, L);
  const Field f = identity_suite_data(grid);
  rep.weight_identities.push_back(check_weight1_identity(f, p));
  rep.weight_identities.push_back(check_weight1_noderivative_identity(f, p));
  auto two = check_weight2_identities(f, p);
  rep.weight_identities.push_back(two.first);
  rep.weight_identities.push_back(two.second);

  auto fj_grid = make_grid(1024, 30.0);
  const Field g = Field::sample(fj_grid, [](double x) {
    const double s = x / 0.5;
    return std::exp(-s * s);
  });
  for (int j = 1; j <= 4; ++j)
    rep.expansions.push_back(verify_Fj_expansion(g, 1.0, p, j));
  return rep;
}

// ---- Stein table ------------------------------------------------------------------

struct SteinTableEntry {
  double alpha = 0.0;
  double theta = 0.0;
  MembershipReport report;
  bool expected_member = false;
  bool correct = false;
  double near_slope_error = 0.0;  // vs alpha - theta (0 when theta < alpha)
  double far_slope_error = 0.0;   // vs -(1/2 + theta)
  bool diagonal = false;          // theta == alpha: logarithmic borderline
};

struct SteinTableReport {
  std::vector<SteinTableEntry> entries;
  int misclassified = 0;
  double max_near_slope_error = 0.0;  // off-diagonal entries only
  double max_far_slope_error = 0.0;
};

// Classifies the Stein derivative of |xi|^alpha (cutoff) over the (alpha,
// theta) grid {0.1, ..., 0.9}^2 and compares slopes with the power-counting
// predictions.
inline SteinTableReport run_stein_table() {
  SteinTableReport rep;
  const std::array<double, 5> vals = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (double alpha : vals) {
    for (double theta : vals) {
      SteinTableEntry e;
      e.alpha = alpha;
      e.theta = theta;
      e.diagonal = (alpha == theta);
      e.expected_member = theta < alpha + 0.5;
      const SteinSymbol g = SteinSymbol::power(alpha);
      e.report = classify_l2_membership(g, theta);
      e.correct =
          (e.report.verdict == L2Class::member) == e.expected_member;
      if (!e.correct) ++rep.misclassified;
      if (!e.diagonal) {
        const double near_expected = (theta > alpha) ? (alpha - theta) : 0.0;
        e.near_slope_error = std::abs(e.report.near_slope - near_expected);
        rep.max_near_slope_error =
            std::max(rep.max_near_slope_error, e.near_slope_error);
      }
      e.far_slope_error = std::abs(e.report.far_slope + 0.5 + theta);
      rep.max_far_slope_error =
          std::max(rep.max_far_slope_error, e.far_slope_error);
      rep.entries.push_back(e);
    }
  }
  return rep;
}

// ---- probes and ground state --------------------------------------------------------

inline const char* probe_kind_name(ProbeKind k) {
  switch (k) {
    case ProbeKind::hilbert_commutator: return "hilbert_commutator";
    case ProbeKind::derivative_hilbert_commutator:
      return "derivative_hilbert_commutator";
    case ProbeKind::fractional_commutator: return "fractional_commutator";
    case ProbeKind::bessel_commutator: return "bessel_commutator";
    case ProbeKind::bessel_product: return "bessel_product";
    case ProbeKind::weighted_bessel_ratio: return "weighted_bessel_ratio";
    case ProbeKind::phase_stein_bound: return "phase_stein_bound";
  }
  return "unknown";
}

inline std::vector<ProbeKind> all_probe_kinds() {
  return {ProbeKind::hilbert_commutator,
          ProbeKind::derivative_hilbert_commutator,
          ProbeKind::fractional_commutator,
          ProbeKind::bessel_commutator,
          ProbeKind::bessel_product,
          ProbeKind::weighted_bessel_ratio,
          ProbeKind::phase_stein_bound};
}

inline std::vector<ProbeReport> run_probe_suite(
    int trials = 50, std::uint64_t seed = 20260301ULL) {
  std::vector<ProbeReport> out;
  for (ProbeKind k : all_probe_kinds())
    out.push_back(probe_estimate(k, trials, seed));
  return out;
}

struct GroundStateExperimentReport {
  GroundStateResult result;
  double profile_l2 = 0.0;
  double scaling_residual = 0.0;      // plug-in residual of the lambda = 1/2
                                      // rescaled profile at the rescaled speed
  double soliton_interior_error = -1.0;  // a = 0 only: vs the closed form
};

inline GroundStateExperimentReport run_ground_state(
    const ExperimentConfig& cfg) {
  auto grid = make_grid(cfg.n, cfg.box);
  GroundStateExperimentReport rep{
      solve_ground_state(cfg.params, cfg.data.speed, grid)};
  rep.profile_l2 = rep.result.profile.l2_norm();
  rep.scaling_residual = scaling_family_residual(rep.result, 0.5);
  if (cfg.params.a == 0.0) {
    const double radius = 0.6 * grid->L();
    const Field exact = bo_soliton(grid, rep.result.c);
    rep.soliton_interior_error =
        interior_l2_distance(rep.result.profile, exact, radius) /
        interior_l2(exact, radius);
  }
  return rep;
}

// ---- defaults ------------------------------------------------------------------------

// Baked-in designs for each experiment id; a config file overrides fields.
inline ExperimentConfig default_experiment_config(const std::string& id) {
  ExperimentConfig cfg;
  cfg.experiment = id;
  cfg.params = DispersionParams(0.5, 1);
  if (id == "persistence") {
    cfg.n = 2048;
    cfg.box = 100.0;
    cfg.data.amplitude = 0.25;
    cfg.data.width = 2.0;
    cfg.evolution.dt = 1e-3;
    cfg.evolution.t_end = 1.0;
    cfg.evolution.snapshot_stride = 20;
  } else if (id == "mean-threshold" || id == "momentum-threshold") {
    cfg.n = 2048;
    cfg.box = 100.0;
    if (id == "momentum-threshold") cfg.data.kind = "derivative-of-gaussian";
    cfg.data.width = 4.0;
    cfg.evolution.dt = 1e-3;
    cfg.evolution.t_end = 1.0;
    cfg.evolution.snapshot_stride = 100;
  } else if (id == "t-star" || id == "two-time-momentum") {
    cfg.n = 16384;
    cfg.box = 512.0;
    cfg.data.kind = "derivative-of-gaussian";
    cfg.data.amplitude = 1.77;
    cfg.data.width = 0.5;
    cfg.evolution.dt = 1e-4;
    cfg.evolution.t_end = 1.0;
    cfg.evolution.snapshot_stride = 100;
  } else if (id == "k-momentum") {
    cfg.params = DispersionParams(0.5, 2);
    cfg.n = 65536;
    cfg.box = 8192.0;
    cfg.data.amplitude = 0.3;
    cfg.data.width = 1.5;
    cfg.evolution.dt = 1e-3;
    cfg.evolution.t_end = 1.0;
    cfg.evolution.snapshot_stride = 100;
  } else if (id == "identities") {
    cfg.n = 4096;
    cfg.box = 60.0;
  } else if (id == "ground-state") {
    cfg.n = 8192;
    cfg.box = 600.0;
    cfg.data.speed = 1.0;
  } else if (id == "estimate-probes" || id == "stein-table") {
    // no grid or evolution settings consumed
  } else {
    throw ConfigError("unknown experiment id: '" + id + "'");
  }
  cfg.evolution.params = cfg.params;
  return cfg;
}

inline MomentumThresholdReport run_momentum_threshold(
    const ExperimentConfig& cfg) {
  {
    auto grid = make_grid(cfg.n, cfg.box);
    const Field u0 = make_initial_data(grid, cfg.data);
    if (!zdot_member(u0, 1e-8))
      throw std::invalid_argument(
          "run_momentum_threshold: data must have zero mean");
  }
  MomentumThresholdReport rep;
  rep.dichotomy = detail::dichotomy_scan(cfg, 3.5 + cfg.params.a);
  // The root of c(t) for wide data sits far outside any affordable horizon,
  // so the flip mechanism is demonstrated on the dedicated root-scale data.
  ExperimentConfig root_cfg = default_experiment_config("t-star");
  root_cfg.params = cfg.params;
  root_cfg.evolution.params = cfg.params;
  root_cfg.seed = cfg.seed;
  rep.root_mechanism = run_t_star(root_cfg);
  return rep;
}

// ---- JSON serialization -----------------------------------------------------------------

inline Json to_json(const GrowthReport& g) {
  return Json{{"norm1", g.norm1},
              {"norm2", g.norm2},
              {"norm4", g.norm4},
              {"q", g.q},
              {"verdict", to_string(g.verdict)}};
}

inline Json to_json(const TailFit& t) {
  return Json{{"slope", t.slope},   {"x_lo", t.x_lo},
              {"x_hi", t.x_hi},     {"r2", t.r2},
              {"samples", t.samples}, {"reliable", t.reliable}};
}

inline Json to_json(const IdentityReport& r) {
  return Json{{"name", r.name},
              {"lhs_norm", r.lhs_norm},
              {"residual_norm", r.residual_norm},
              {"relative_residual", r.relative_residual},
              {"n", r.n},
              {"L", r.L}};
}

inline Json to_json(const PersistenceReport& rep) {
  Json cases = Json::array();
  for (const auto& c : rep.cases) {
    cases.push_back(Json{{"s", c.s},
                         {"r", c.r},
                         {"sup_sobolev", c.sup_sobolev},
                         {"sup_weight", c.sup_weight},
                         {"growth", to_json(c.growth)},
                         {"bounded", c.bounded}});
  }
  return Json{{"boxes", rep.boxes},
              {"cases", cases},
              {"all_bounded", rep.all_bounded}};
}

inline Json to_json(const DichotomyCase& c) {
  return Json{{"r", c.r},
              {"growth", to_json(c.growth)},
              {"expected", to_string(c.expected)},
              {"matches", c.matches}};
}

inline Json to_json(const DichotomyReport& rep) {
  return Json{{"data_kind", rep.data_kind},
              {"threshold", rep.threshold},
              {"below", to_json(rep.below)},
              {"above", to_json(rep.above)},
              {"tail_linear", to_json(rep.tail_linear)},
              {"tail_nonlinear", to_json(rep.tail_nonlinear)},
              {"verdicts_ok", rep.verdicts_ok},
              {"tail_in_band", rep.tail_in_band}};
}

inline Json to_json(const TStarReport& rep) {
  Json j{{"M0", rep.M0},
         {"I2_0", rep.I2_0},
         {"t_star_formula", rep.t_star_formula},
         {"t_star_measured", rep.t_star_measured},
         {"relative_gap", rep.relative_gap},
         {"m_linearity_residual", rep.m_linearity_residual},
         {"c_closed_form_gap", rep.c_closed_form_gap},
         {"degenerate", rep.degenerate},
         {"used_quadratic_fit", rep.used_quadratic_fit}};
  if (!rep.degenerate) {
    j["growth_at_root"] = to_json(rep.growth_at_root);
    j["growth_at_half"] = to_json(rep.growth_at_half);
    j["improved_decay_at_root"] = rep.improved_decay_at_root;
  }
  return j;
}

inline Json to_json(const TwoTimeMomentumReport& rep) {
  return Json{{"root_run", to_json(rep.base)},
              {"t_m", rep.t_m},
              {"ratio", rep.ratio},
              {"m_at_t_m", rep.m_at_t_m},
              {"c_at_t_m", rep.c_at_t_m},
              {"c_at_t_m_closed_form", rep.c_at_t_m_closed_form},
              {"still_divergent_at_half", rep.still_divergent_at_half}};
}

inline Json to_json(const MomentumThresholdReport& rep) {
  return Json{{"dichotomy", to_json(rep.dichotomy)},
              {"root_mechanism", to_json(rep.root_mechanism)}};
}

inline Json to_json(const KMomentumReport& rep) {
  return Json{{"k", rep.k},
              {"residual", rep.law.residual},
              {"M0", rep.law.M0},
              {"I2_0", rep.law.I2_0},
              {"escape_flag", rep.law.escape_flag},
              {"valid_until", rep.law.valid_until},
              {"monotone_increasing", rep.monotone_increasing},
              {"zero_data", rep.zero_data}};
}

inline Json to_json(const ProbeReport& rep) {
  return Json{{"kind", probe_kind_name(rep.kind)},
              {"trials", rep.trials},
              {"max_ratio", rep.max_ratio},
              {"grid_sizes", rep.grid_sizes},
              {"per_grid_max", rep.per_grid_max},
              {"refinement_spread", rep.refinement_spread},
              {"amplitude_applicable", rep.amplitude_applicable},
              {"amplitude_scaling_exact", rep.amplitude_scaling_exact}};
}

inline Json to_json(const MembershipReport& rep) {
  return Json{{"verdict",
               rep.verdict == L2Class::member ? "member" : "non_member"},
              {"near_slope", rep.near_slope},
              {"far_slope", rep.far_slope},
              {"near_converges", rep.near_converges},
              {"far_converges", rep.far_converges},
              {"statistic", rep.statistic}};
}

inline Json to_json(const SteinTableReport& rep) {
  Json entries = Json::array();
  for (const auto& e : rep.entries) {
    entries.push_back(Json{{"alpha", e.alpha},
                           {"theta", e.theta},
                           {"report", to_json(e.report)},
                           {"expected_member", e.expected_member},
                           {"correct", e.correct},
                           {"near_slope_error", e.near_slope_error},
                           {"far_slope_error", e.far_slope_error},
                           {"diagonal", e.diagonal}});
  }
  return Json{{"entries", entries},
              {"misclassified", rep.misclassified},
              {"max_near_slope_error", rep.max_near_slope_error},
              {"max_far_slope_error", rep.max_far_slope_error}};
}

inline Json to_json(const IdentitySuiteReport& rep) {
  Json wi = Json::array(), ex = Json::array();
  for (const auto& r : rep.weight_identities) wi.push_back(to_json(r));
  for (const auto& r : rep.expansions) ex.push_back(to_json(r));
  return Json{{"a", rep.a},
              {"n", rep.n},
              {"L", rep.box},
              {"weight_identities", wi},
              {"expansions", ex}};
}

inline Json to_json(const GroundStateExperimentReport& rep) {
  Json j{{"a", rep.result.a},
         {"c", rep.result.c},
         {"iterations", rep.result.iterations},
         {"residual", rep.result.residual},
         {"profile_l2", rep.profile_l2},
         {"tail", to_json(rep.result.tail)},
         {"scaling_residual", rep.scaling_residual}};
  if (rep.soliton_interior_error >= 0.0)
    j["soliton_interior_error"] = rep.soliton_interior_error;
  return j;
}

// ---- dispatch ------------------------------------------------------------------------------

// Runs the configured experiment, writes its artifacts under cfg.output_dir,
// and returns the process exit code: 0 on success, 2 when an asserted
// scientific verdict came out wrong.
inline int run_experiment(const ExperimentConfig& cfg) {
  const std::string dir = cfg.output_dir;
  Json manifest;
  manifest["config"] = to_json(cfg);
  int code = 0;

  if (cfg.experiment == "persistence") {
    const PersistenceReport rep = run_persistence(cfg);
    manifest["report"] = to_json(rep);
    if (!rep.all_bounded) code = 2;
  } else if (cfg.experiment == "mean-threshold") {
    const DichotomyReport rep = run_mean_threshold(cfg);
    manifest["report"] = to_json(rep);
    if (!rep.verdicts_ok || !rep.tail_in_band) code = 2;
  } else if (cfg.experiment == "momentum-threshold") {
    const MomentumThresholdReport rep = run_momentum_threshold(cfg);
    manifest["report"] = to_json(rep);
    write_ledger_csv(dir + "/ledger.csv", rep.root_mechanism.ledger);
    const bool root_ok = rep.root_mechanism.degenerate ||
                         (rep.root_mechanism.relative_gap <= 0.01 &&
                          rep.root_mechanism.improved_decay_at_root);
    if (!rep.dichotomy.verdicts_ok || !rep.dichotomy.tail_in_band || !root_ok)
      code = 2;
  } else if (cfg.experiment == "t-star") {
    const TStarReport rep = run_t_star(cfg);
    manifest["report"] = to_json(rep);
    write_ledger_csv(dir + "/ledger.csv", rep.ledger);
    if (!rep.degenerate &&
        (rep.relative_gap > 0.01 || !rep.improved_decay_at_root))
      code = 2;
  } else if (cfg.experiment == "two-time-momentum") {
    const TwoTimeMomentumReport rep = run_two_time_momentum(cfg);
    manifest["report"] = to_json(rep);
    write_ledger_csv(dir + "/ledger.csv", rep.base.ledger);
    if (!rep.base.degenerate &&
        (std::abs(rep.ratio - 2.0) > 0.01 || !rep.still_divergent_at_half))
      code = 2;
  } else if (cfg.experiment == "k-momentum") {
    const KMomentumReport rep = run_k_momentum(cfg);
    manifest["report"] = to_json(rep);
    write_ledger_csv(dir + "/ledger.csv", rep.ledger);
    const double tol =
        rep.k == 1 ? 1e-6 * (1.0 + std::abs(rep.law.M0)) : 1e-5;
    bool ok = rep.law.residual < tol;
    if (rep.k % 2 == 1 && rep.k > 1 && !rep.zero_data)
      ok = ok && rep.monotone_increasing;
    if (!ok) code = 2;
  } else if (cfg.experiment == "estimate-probes") {
    Json arr = Json::array();
    bool ok = true;
    for (const ProbeReport& rep : run_probe_suite(50, cfg.seed)) {
      arr.push_back(to_json(rep));
      ok = ok && rep.refinement_spread < 0.05 &&
           (!rep.amplitude_applicable || rep.amplitude_scaling_exact);
    }
    manifest["report"] = Json{{"probes", arr}};
    if (!ok) code = 2;
  } else if (cfg.experiment == "identities") {
    const IdentitySuiteReport rep =
        run_identity_suite(cfg.params.a, cfg.n, cfg.box);
    manifest["report"] = to_json(rep);
    bool ok = true;
    for (const auto& r : rep.weight_identities)
      ok = ok && r.relative_residual < 1e-7;
    for (std::size_t j = 0; j < rep.expansions.size(); ++j)
      ok = ok && rep.expansions[j].relative_residual < (j < 3 ? 1e-5 : 1e-4);
    if (!ok) code = 2;
  } else if (cfg.experiment == "stein-table") {
    const SteinTableReport rep = run_stein_table();
    manifest["report"] = to_json(rep);
    if (rep.misclassified != 0 || rep.max_near_slope_error > 0.02 ||
        rep.max_far_slope_error > 0.05)
      code = 2;
  } else if (cfg.experiment == "ground-state") {
    const GroundStateExperimentReport rep = run_ground_state(cfg);
    manifest["report"] = to_json(rep);
    write_field_csv(dir + "/profile.csv", rep.result.profile);
    if (rep.result.residual >
        1e-8 * std::max(rep.profile_l2, 1e-300))
      code = 2;
  } else {
    throw ConfigError("unknown experiment id: '" + cfg.experiment + "'");
  }

  manifest["exit_code"] = code;
  write_json_atomic(dir + "/manifest.json", manifest);
  return code;
}

}  // namespace dgbo
