#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "giwe/kernels.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace giwe;

namespace {

PhaseSpaceFunction gaussian_state(const PhaseGrid& g, const Vec& r0,
                                  const Vec& p0, double sigma = 1.0) {
  return weyl(psi_to_rho(make_gaussian(g, r0, p0, sigma)));
}

double sum_rhs(const PhaseSpaceFunction& f) {
  double s = 0;
  for (const cplx& v : f.field.data) s += v.real();
  return s;
}

} // namespace

TEST_CASE("field-activity flags") {
  PhaseGrid g = make_grid({2, 8, 8, 4.0, 4.0, 1.0});
  GaussLegendre quad(8);
  KernelSet kf = build_kernels(scenarios::free_particle(2), g, quad);
  CHECK_FALSE(kf.has_electric);
  CHECK_FALSE(kf.has_magnetic);
  KernelSet ke = build_kernels(scenarios::uniform_E(2, {0.4, 0.1}), g, quad);
  CHECK(ke.has_electric);
  CHECK_FALSE(ke.has_magnetic);
  KernelSet kb = build_kernels(scenarios::uniform_B_symmetric(0.7), g, quad);
  CHECK_FALSE(kb.has_electric);
  CHECK(kb.has_magnetic);
}

TEST_CASE("convolution theorem on a small grid") {
  PhaseGrid g = make_grid({2, 8, 8, 4.0, 4.0, 1.0});
  GaussLegendre quad(12);
  KernelSet k = build_kernels(scenarios::linear_B(0.5, 0.2), g, quad);
  PhaseSpaceFunction F = gaussian_state(g, {0.2, -0.1}, {0.3, 0.1});
  const ComplexField a = convolve_P(k.ell1[0], F.field);
  const ComplexField b = convolve_P_direct(k.ell1[0], F.field);
  CHECK(oracles::rel_sup(a, b) < 1e-10);
  const ComplexField c = convolve_P(k.mw2, F.field);
  const ComplexField d = convolve_P_direct(k.mw2, F.field);
  CHECK(oracles::rel_sup(c, d) < 1e-10);
}

TEST_CASE("kernel application equals direct convolution assembly") {
  PhaseGrid g = make_grid({2, 8, 8, 4.0, 4.0, 1.0});
  GaussLegendre quad(12);
  EMConfiguration cfg = scenarios::linear_B(0.5, 0.2);
  // add an electric field so every kernel term participates
  cfg.phi = [](const Vec& r, double) { return 0.3 * r[0] - 0.1 * r[1]; };
  cfg.grad_phi = [](const Vec&, double) { return Vec{0.3, -0.1}; };
  cfg.dE = [](const Vec&, double) { return Mat{{{0, 0}, {0, 0}}}; };
  KernelSet k = build_kernels(cfg, g, quad);
  CHECK(k.has_electric);
  CHECK(k.has_magnetic);

  PhaseSpaceFunction F = gaussian_state(g, {0.2, -0.1}, {0.3, 0.1});
  const PhaseSpaceFunction fast = apply_weak_rhs(F, k);

  ComplexField acc = convolve_P_direct(k.ell0, F.field);
  for (int j = 0; j < 2; ++j) {
    const ComplexField cj = convolve_P_direct(k.ell1[j], F.field);
    const ComplexField gj = spectral_gradient(F.field, 2 + j);
    const ComplexField mj = convolve_P_direct(k.mw1[j], gj);
    // P_j weight applies outside the convolution
    const int nP = g.n_s(), nR = g.n_r();
    for (int k0 = 0; k0 < nP; ++k0)
      for (int k1 = 0; k1 < nP; ++k1)
        for (int a = 0; a < nR * nR; ++a) {
          const std::size_t idx =
              ((static_cast<std::size_t>(k0) * nP + k1) * nR * nR) + a;
          const double Pj = g.P(j == 0 ? k0 : k1);
          acc.data[idx] += Pj * cj.data[idx] + mj.data[idx];
        }
  }
  const ComplexField m2 = convolve_P_direct(k.mw2, F.field);
  for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += m2.data[i];
  CHECK(oracles::rel_sup(fast.field, acc) < 1e-10);
}

TEST_CASE("uniform E: kernel term reduces to the classical force term") {
  // For uniform E the full kernel action equals -qE . grad_P F. Checked via
  // moments: sum_P RHS = 0 and sum_P P_x RHS dP = qE_x sum_P F dP.
  PhaseGrid g = make_grid({1, 32, 64, 8.0, 8.0, 1.0});
  GaussLegendre quad(8);
  EMConfiguration cfg = scenarios::uniform_E(1, {0.4, 0});
  cfg.q = 1.3;
  KernelSet k = build_kernels(cfg, g, quad);
  PhaseSpaceFunction F = gaussian_state(g, {0.0, 0}, {0.5, 0});
  PhaseSpaceFunction rhs = apply_weak_rhs(F, k);

  CHECK(std::abs(sum_rhs(rhs)) * g.dP() * g.dr() < 1e-12);

  double mom = 0, mass = 0;
  for (int kk = 0; kk < g.n_s(); ++kk)
    for (int a = 0; a < g.n_r(); ++a) {
      mom += g.P(kk) * rhs.field.data[kk * g.n_r() + a].real();
      mass += F.field.data[kk * g.n_r() + a].real();
    }
  CHECK(mom == doctest::Approx(cfg.q * 0.4 * mass).epsilon(1e-8));
}

TEST_CASE("momentum-sum annihilation is pointwise in r") {
  PhaseGrid g = make_grid({2, 8, 16, 4.0, 6.0, 1.0});
  GaussLegendre quad(12);
  EMConfiguration cfg = scenarios::linear_B(0.5, 0.2);
  KernelSet k = build_kernels(cfg, g, quad);
  PhaseSpaceFunction F = gaussian_state(g, {0.2, -0.1}, {0.3, 0.1});
  PhaseSpaceFunction rhs = apply_weak_rhs(F, k);
  const int nP = g.n_s(), nR = g.n_r();
  const double cell = g.dP() * g.dP();
  double worst = 0;
  for (int a = 0; a < nR * nR; ++a) {
    cplx acc(0, 0);
    for (int k0 = 0; k0 < nP; ++k0)
      for (int k1 = 0; k1 < nP; ++k1)
        acc += rhs.field
                   .data[(static_cast<std::size_t>(k0) * nP + k1) * nR * nR + a];
    worst = std::max(worst, std::abs(acc) * cell);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("sinc operators: constant g collapses to multiplication") {
  PhaseGrid g = make_grid({1, 32, 32, 6.0, 6.0, 1.0});
  GaussLegendre quad(8);
  PhaseSpaceFunction F = gaussian_state(g, {0.1, 0}, {0.4, 0});

  SincOperatorSpec spec;
  spec.kind = SincOperatorSpec::Kind::sinc;
  spec.g = [](const Vec&) { return 1.7; };
  spec.g_deriv = [](const std::array<int, 2>& al, const Vec&) {
    return (al[0] == 0 && al[1] == 0) ? 1.7 : 0.0;
  };
  const PhaseSpaceFunction a = apply_sinc_operator(spec, F, quad);
  for (std::size_t i = 0; i < F.field.data.size(); ++i)
    CHECK(std::abs(a.field.data[i] - 1.7 * F.field.data[i]) < 1e-12);

  spec.kind = SincOperatorSpec::Kind::sinc_prime;
  const PhaseSpaceFunction b = apply_sinc_operator(spec, F, quad);
  CHECK(oracles::sup_abs(b.field) < 1e-12);
  const PhaseSpaceFunction c = apply_sinc_series(spec, F);
  CHECK(oracles::sup_abs(c.field) < 1e-12);
}

TEST_CASE("sinc quadrature route equals the series route for polynomials") {
  // With g a polynomial of degree <= 3 the truncated series is the exact
  // operator, so both routes must agree to solver precision.
  for (int d : {1, 2}) {
    PhaseGrid g = make_grid({d, d == 1 ? 32 : 16, d == 1 ? 32 : 16, 6.0, 6.0,
                             1.0});
    GaussLegendre quad(16);
    PhaseSpaceFunction F = gaussian_state(g, {0.1, -0.2}, {0.4, 0.3});

    oracles::Poly2 poly;
    poly.terms = {{0, 0, 0.7}, {1, 0, 0.4}, {2, 0, -0.15},
                  {3, 0, 0.05}};
    if (d == 2) {
      poly.terms.push_back({1, 1, 0.2});
      poly.terms.push_back({0, 2, -0.1});
      poly.terms.push_back({2, 1, 0.04});
    }

    for (auto kind : {SincOperatorSpec::Kind::sinc,
                      SincOperatorSpec::Kind::sinc_prime}) {
      SincOperatorSpec spec;
      spec.kind = kind;
      spec.n_series = 3;
      spec.g = [&poly](const Vec& r) { return poly.eval(r); };
      spec.g_deriv = [&poly](const std::array<int, 2>& al, const Vec& r) {
        return poly.deriv(al, r);
      };
      const PhaseSpaceFunction a = apply_sinc_operator(spec, F, quad);
      const PhaseSpaceFunction b = apply_sinc_series(spec, F);
      CHECK(oracles::rel_sup(a.field, b.field) < 1e-9);
    }
  }
}

TEST_CASE("strong and weak generators agree on a small magnetic grid") {
  PhaseGrid g = make_grid({2, 16, 16, 6.0, 6.0, 1.0});
  GaussLegendre quad(16);
  EMConfiguration cfg = scenarios::linear_B(0.5, 0.2);
  KernelSet k = build_kernels(cfg, g, quad);
  PhaseSpaceFunction F = gaussian_state(g, {0.2, -0.1}, {0.3, 0.1});

  const PhaseSpaceFunction weak = weak_generator(F, k);
  const PhaseSpaceFunction sq = strong_rhs(F, cfg, quad, SincRoute::quadrature);
  const PhaseSpaceFunction ss = strong_rhs(F, cfg, quad, SincRoute::series, 3);
  CHECK(oracles::rel_sup(sq.field, weak.field) < 1e-10);
  CHECK(oracles::rel_sup(ss.field, weak.field) < 1e-9);
}
