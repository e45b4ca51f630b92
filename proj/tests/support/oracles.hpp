#pragma once

// Shared helpers for the test suites: slow direct-sum references, adaptive
// quadrature, exact polynomial derivatives, and field comparison metrics.

#include "giwe/fields.hpp"
#include "giwe/grid.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracles {

using giwe::cplx;
using giwe::ComplexField;
using giwe::Vec;

inline double sup_abs(const ComplexField& f) {
  double m = 0;
  for (const cplx& v : f.data) m = std::max(m, std::abs(v));
  return m;
}

inline double sup_dev(const ComplexField& a, const ComplexField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline double rel_sup(const ComplexField& a, const ComplexField& b) {
  const double ref = std::max(sup_abs(a), sup_abs(b));
  return ref > 0 ? sup_dev(a, b) / ref : 0.0;
}

inline double rel_l2(const ComplexField& a, const ComplexField& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    num += std::norm(a.data[i] - b.data[i]);
    den += std::norm(b.data[i]);
  }
  return std::sqrt(num) / (std::sqrt(den) + 1e-300);
}

// Direct Riemann-sum realization of the centered forward transform
//   F(P_k) = (2 pi hbar)^(-1/2) sum_j exp(-i s_j P_k / hbar) f(s_j) ds
// for a single axis; O(n^2), independent of any FFT machinery.
inline std::vector<cplx> direct_s_to_P(const std::vector<cplx>& f,
                                       const giwe::PhaseGrid& g) {
  const int n = g.n_s();
  std::vector<cplx> out(n, cplx(0, 0));
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi * g.hbar());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      out[k] += std::polar(1.0, -g.s(j) * g.P(k) / g.hbar()) * f[j];
  for (cplx& v : out) v *= c * g.ds();
  return out;
}

// Adaptive Simpson quadrature on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-12,
                               int depth = 30) {
  auto simpson = [&f](double lo, double hi) {
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  };
  std::function<double(double, double, double, double, int)> rec =
      [&](double lo, double hi, double whole, double eps, int d) -> double {
    const double mid = 0.5 * (lo + hi);
    const double left = simpson(lo, mid), right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * eps)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, left, eps / 2, d - 1) +
           rec(mid, hi, right, eps / 2, d - 1);
  };
  return rec(a, b, simpson(a, b), tol, depth);
}

// Bivariate polynomial with exact partial derivatives.
struct Poly2 {
  struct Term {
    int a, b;
    double c;
  };
  std::vector<Term> terms;
  double eval(const Vec& r) const {
    double s = 0;
    for (const Term& t : terms)
      s += t.c * std::pow(r[0], t.a) * std::pow(r[1], t.b);
    return s;
  }
  double deriv(const std::array<int, 2>& al, const Vec& r) const {
    double s = 0;
    for (const Term& t : terms) {
      if (al[0] > t.a || al[1] > t.b) continue;
      double c = t.c;
      for (int k = 0; k < al[0]; ++k) c *= t.a - k;
      for (int k = 0; k < al[1]; ++k) c *= t.b - k;
      s += c * std::pow(r[0], t.a - al[0]) * std::pow(r[1], t.b - al[1]);
    }
    return s;
  }
};

// Richardson-extrapolated central difference, O(h^4).
inline double fd_deriv(const std::function<double(double)>& f, double x,
                       double h = 1e-3) {
  const double d1 = (f(x + h) - f(x - h)) / (2 * h);
  const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
  return (4 * d2 - d1) / 3;
}

} // namespace oracles
