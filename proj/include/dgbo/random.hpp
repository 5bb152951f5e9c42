#pragma once

// Deterministic random data for probes and property tests. mt19937_64 with
// an explicit Box-Muller transform: std::normal_distribution's algorithm is
// implementation-defined, which would break byte-identical reruns across
// standard libraries.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dgbo/grid.hpp"

namespace dgbo {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {
    // in (0, 1]; avoids log(0) below
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Random band-limited trigonometric polynomial with 1/(1+m) coefficient
// decay. The coefficients are drawn independently of the grid size, so the
// same seed yields the same function across refinements (values agree
// exactly at shared nodes).
struct TrigCoeffs {
  std::vector<double> a, b;  // cos / sin amplitudes for modes 1..m_max
};

inline TrigCoeffs random_trig_coeffs(Rng& rng, int m_max = 40) {
  TrigCoeffs c;
  c.a.resize(m_max);
  c.b.resize(m_max);
  for (int m = 1; m <= m_max; ++m) {
    c.a[m - 1] = rng.normal() / (1.0 + m);
    c.b[m - 1] = rng.normal() / (1.0 + m);
  }
  return c;
}

inline Field trig_field(GridPtr g, const TrigCoeffs& c) {
  const double L = g->L();
  std::vector<double> vals(g->n(), 0.0);
  for (int j = 0; j < g->n(); ++j) {
    const double x = g->x()[j];
    double s = 0.0;
    for (size_t i = 0; i < c.a.size(); ++i) {
      const double km = M_PI * static_cast<double>(i + 1) / L;
      s += c.a[i] * std::cos(km * x) + c.b[i] * std::sin(km * x);
    }
    vals[j] = s;
  }
  return Field::from_values(std::move(g), vals);
}

}  // namespace dgbo
