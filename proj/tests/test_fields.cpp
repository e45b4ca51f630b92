#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "giwe/fields.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace giwe;

TEST_CASE("Gauss-Legendre: weights sum to 2 and monomials are exact") {
  for (int order : {4, 8, 16}) {
    GaussLegendre q(order);
    double wsum = 0;
    for (double w : q.weights()) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // exact for polynomials up to degree 2*order - 1
    for (int deg = 0; deg <= 2 * order - 1; ++deg) {
      double acc = 0;
      for (int i = 0; i < order; ++i)
        acc += q.weights()[i] * std::pow(q.nodes()[i], deg);
      const double exact = (deg % 2 == 0) ? 2.0 / (deg + 1) : 0.0;
      CHECK(std::abs(acc - exact) < 1e-13);
    }
  }
}

TEST_CASE("catalog scenarios have self-consistent derivative closures") {
  const std::vector<EMConfiguration> cat = {
      scenarios::free_particle(1),
      scenarios::free_particle(2),
      scenarios::uniform_E(1, {0.4, 0.0}),
      scenarios::uniform_E(2, {0.4, -0.2}),
      scenarios::uniform_B_symmetric(0.8),
      scenarios::uniform_B_landau(0.8),
      scenarios::linear_B(0.5, 0.3),
      scenarios::harmonic_well(1, 1.2),
      scenarios::harmonic_well(2, 0.7)};
  for (const EMConfiguration& cfg : cat) {
    INFO(cfg.name);
    CHECK(potential_consistency_error(cfg, 3.0) < 1e-6);
  }
}

TEST_CASE("derived fields match their definitions") {
  EMConfiguration e = scenarios::uniform_E(2, {0.3, -0.1});
  CHECK(e.E({1.0, 2.0})[0] == doctest::Approx(0.3));
  CHECK(e.E({1.0, 2.0})[1] == doctest::Approx(-0.1));
  CHECK(e.Bz({1.0, 2.0}) == doctest::Approx(0.0));

  EMConfiguration bs = scenarios::uniform_B_symmetric(0.8);
  EMConfiguration bl = scenarios::uniform_B_landau(0.8);
  for (const Vec r : {Vec{0.0, 0.0}, Vec{1.5, -0.4}}) {
    CHECK(bs.Bz(r) == doctest::Approx(0.8));
    CHECK(bl.Bz(r) == doctest::Approx(0.8));
    CHECK(std::abs(bs.E(r)[0]) < 1e-14);
    CHECK(std::abs(bs.E(r)[1]) < 1e-14);
  }

  EMConfiguration lb = scenarios::linear_B(0.5, 0.3);
  CHECK(lb.Bz({2.0, -1.0}) == doctest::Approx(0.5 + 0.3 * 2.0));

  EMConfiguration hw = scenarios::harmonic_well(2, 1.1, 1.7, -0.6);
  // q*phi = m w^2 r^2 / 2  =>  q*E = -m w^2 r
  const Vec r{0.7, -0.3};
  CHECK(hw.q * hw.E(r)[0] == doctest::Approx(-1.7 * 1.1 * 1.1 * 0.7));
  CHECK(hw.q * hw.E(r)[1] == doctest::Approx(-1.7 * 1.1 * 1.1 * -0.3));
}

TEST_CASE("lorentz force components") {
  EMConfiguration cfg = scenarios::uniform_B_symmetric(0.8);
  cfg.q = -1.3;
  cfg.m = 2.0;
  const Vec P{0.5, -0.4}, r{0.2, 0.1};
  // q E + (q/m) P x B with B = B_z e_z: (P x B)_x = P_y B, (P x B)_y = -P_x B
  const Vec f = cfg.lorentz(P, r);
  CHECK(f[0] == doctest::Approx(-1.3 / 2.0 * (-0.4) * 0.8));
  CHECK(f[1] == doctest::Approx(-1.3 / 2.0 * (-(0.5)) * 0.8));

  EMConfiguration ue = scenarios::uniform_E(2, {0.3, -0.1});
  ue.q = 2.0;
  const Vec fe = ue.lorentz(P, r);
  CHECK(fe[0] == doctest::Approx(0.6));
  CHECK(fe[1] == doctest::Approx(-0.2));
}

TEST_CASE("gauge transform shifts potentials but not fields") {
  EMConfiguration cfg = scenarios::uniform_B_symmetric(0.8);
  GaugeFunction g;
  g.chi = [](const Vec& r, double) { return 0.4 * r[0] * r[1] + 0.1 * r[0]; };
  g.grad_chi = [](const Vec& r, double) {
    return Vec{0.4 * r[1] + 0.1, 0.4 * r[0]};
  };
  g.hess_chi = [](const Vec&, double) {
    return Mat{{{0.0, 0.4}, {0.4, 0.0}}};
  };
  g.dchi_dt = [](const Vec&, double) { return 0.0; };

  const EMConfiguration cfg2 = gauge_transform(cfg, g);
  for (const Vec r : {Vec{0.0, 0.0}, Vec{1.2, -0.7}, Vec{-2.1, 0.4}}) {
    const Vec dA{cfg2.A(r, 0)[0] - cfg.A(r, 0)[0],
                 cfg2.A(r, 0)[1] - cfg.A(r, 0)[1]};
    CHECK(dA[0] == doctest::Approx(g.grad_chi(r, 0)[0]));
    CHECK(dA[1] == doctest::Approx(g.grad_chi(r, 0)[1]));
    CHECK(cfg2.Bz(r) == doctest::Approx(cfg.Bz(r)));
    CHECK(std::abs(cfg2.E(r)[0] - cfg.E(r)[0]) < 1e-13);
    CHECK(std::abs(cfg2.E(r)[1] - cfg.E(r)[1]) < 1e-13);
  }
  CHECK(potential_consistency_error(cfg2, 3.0) < 1e-6);
}

TEST_CASE("segment moments agree with adaptive quadrature") {
  GaussLegendre quad(16);
  auto g = [](const Vec& p) {
    return std::exp(-0.2 * p[0] * p[0]) * std::cos(0.7 * p[1]) + 0.3 * p[0];
  };
  const Vec r{0.4, -0.8}, s{1.7, 0.9};
  for (int k : {0, 1}) {
    const double got = moment_avg(g, r, s, k, quad);
    const double ref = oracles::adaptive_simpson(
        [&](double tau) {
          const Vec p{r[0] + 0.5 * s[0] * tau, r[1] + 0.5 * s[1] * tau};
          return g(p) * (k == 1 ? tau : 1.0);
        },
        -1.0, 1.0);
    CHECK(std::abs(got - ref) < 1e-10);
  }
}

TEST_CASE("line-averaged vector potential") {
  GaussLegendre quad(16);
  EMConfiguration cfg = scenarios::uniform_B_symmetric(0.8);
  const Vec r{0.9, -0.5}, s{1.2, 2.1};
  // linear A: the segment average equals A at the midpoint r
  const Vec a = line_avg_A(cfg, r, s, quad);
  CHECK(a[0] == doctest::Approx(cfg.A(r, 0)[0]).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(cfg.A(r, 0)[1]).epsilon(1e-12));

  // quadratic A component: check against adaptive quadrature
  EMConfiguration lb = scenarios::linear_B(0.5, 0.3);
  const Vec al = line_avg_A(lb, r, s, quad);
  for (int i = 0; i < 2; ++i) {
    const double ref =
        0.5 * oracles::adaptive_simpson(
                  [&](double tau) {
                    const Vec p{r[0] + 0.5 * s[0] * tau,
                                r[1] + 0.5 * s[1] * tau};
                    return lb.A(p, 0.0)[i];
                  },
                  -1.0, 1.0);
    CHECK(std::abs(al[i] - ref) < 1e-12);
  }
}

TEST_CASE("scenario lookup by name") {
  CHECK(scenarios::by_name("free", {}, 2).name ==
        scenarios::free_particle(2).name);
  CHECK(scenarios::by_name("uniform_B_symmetric", {0.8}, 2).Bz({0, 0}) ==
        doctest::Approx(0.8));
  CHECK_THROWS(scenarios::by_name("no_such_scenario", {}, 1));
}
