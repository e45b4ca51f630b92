#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "giwe/grid.hpp"
#include "support/oracles.hpp"

#include <numbers>
#include <random>

using namespace giwe;

TEST_CASE("grid invariants and validation") {
  PhaseGrid g = make_grid({1, 32, 64, 8.0, 6.0, 0.7});
  CHECK(g.dr() == doctest::Approx(0.5));
  CHECK(g.ds() == doctest::Approx(12.0 / 64));
  // momentum axis is the exact DFT dual of the s axis
  CHECK(g.dP() * g.ds() * g.n_s() ==
        doctest::Approx(2 * std::numbers::pi * g.hbar()));
  CHECK(g.P(g.n_s() / 2) == doctest::Approx(0.0));
  CHECK(g.r(0) == doctest::Approx(-8.0));
  CHECK(g.s(32) == doctest::Approx(0.0));

  CHECK_THROWS_AS(make_grid({3, 32, 32, 8, 8, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({1, 32, 31, 8, 8, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({1, 4, 32, 8, 8, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({1, 32, 32, -8, 8, 1}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({1, 32, 32, 8, 8, 0}), std::invalid_argument);
}

TEST_CASE("wavenumber convention") {
  CHECK(PhaseGrid::wavenumber(0, 8, 0.5) == doctest::Approx(0.0));
  CHECK(PhaseGrid::wavenumber(1, 8, 0.5) ==
        doctest::Approx(2 * std::numbers::pi / 4.0));
  CHECK(PhaseGrid::wavenumber(7, 8, 0.5) ==
        doctest::Approx(-2 * std::numbers::pi / 4.0));
  CHECK(PhaseGrid::wavenumber(4, 8, 0.5) == doctest::Approx(0.0)); // Nyquist
}

TEST_CASE("fft_axis matches a direct DFT") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n0 = 6, n1 = 8;
  std::vector<cplx> data(n0 * n1);
  for (cplx& v : data) v = cplx(u(rng), u(rng));
  std::vector<cplx> ref = data;
  const std::vector<int> shape{n0, n1};
  detail::fft_axis(data, shape, 1, -1);
  for (int a = 0; a < n0; ++a)
    for (int k = 0; k < n1; ++k) {
      cplx acc(0, 0);
      for (int j = 0; j < n1; ++j)
        acc += ref[a * n1 + j] *
               std::polar(1.0, -2 * std::numbers::pi * j * k / n1);
      CHECK(std::abs(acc - data[a * n1 + k]) < 1e-12);
    }
}

TEST_CASE("forward transform matches the Riemann-sum reference, d=1") {
  PhaseGrid g = make_grid({1, 8, 32, 4.0, 6.0, 0.8});
  ComplexField f = make_field(g, {AxisKind::S, AxisKind::R});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  // smooth but otherwise arbitrary line per r-node
  for (int j = 0; j < g.n_s(); ++j)
    for (int a = 0; a < g.n_r(); ++a) {
      const double s = g.s(j);
      f.data[j * g.n_r() + a] =
          std::exp(-0.3 * s * s) * cplx(std::cos(0.9 * s + a), u(rng) * 0.0) +
          cplx(0, 0.2 * std::sin(0.5 * s - a));
    }
  const ComplexField F = dft_s_to_P(f);
  CHECK(F.axes[0] == AxisKind::P);
  for (int a = 0; a < g.n_r(); ++a) {
    std::vector<cplx> line(g.n_s());
    for (int j = 0; j < g.n_s(); ++j) line[j] = f.data[j * g.n_r() + a];
    const std::vector<cplx> ref = oracles::direct_s_to_P(line, g);
    for (int k = 0; k < g.n_s(); ++k)
      CHECK(std::abs(F.data[k * g.n_r() + a] - ref[k]) < 1e-12);
  }
}

TEST_CASE("transform round-trip is the identity") {
  for (int d : {1, 2}) {
    PhaseGrid g = make_grid({d, 8, 16, 4.0, 5.0, 1.3});
    std::vector<AxisKind> axes;
    for (int i = 0; i < d; ++i) axes.push_back(AxisKind::S);
    for (int i = 0; i < d; ++i) axes.push_back(AxisKind::R);
    ComplexField f = make_field(g, axes);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (cplx& v : f.data) v = cplx(u(rng), u(rng));
    const ComplexField back = idft_P_to_s(dft_s_to_P(f));
    CHECK(oracles::sup_dev(back, f) < 1e-12);
  }
}

TEST_CASE("transform input tagging is enforced") {
  PhaseGrid g = make_grid({1, 8, 16, 4.0, 5.0, 1.0});
  ComplexField F = make_field(g, {AxisKind::P, AxisKind::R});
  CHECK_THROWS_AS(dft_s_to_P(F), std::invalid_argument);
  ComplexField f = make_field(g, {AxisKind::S, AxisKind::R});
  CHECK_THROWS_AS(idft_P_to_s(f), std::invalid_argument);
}

TEST_CASE("spectral gradient is exact for band-limited data") {
  PhaseGrid g = make_grid({1, 32, 16, 8.0, 4.0, 1.0});
  ComplexField f = make_field(g, {AxisKind::S, AxisKind::R});
  const double kr = 2 * std::numbers::pi / (2 * g.L_r()); // one full period
  for (int j = 0; j < g.n_s(); ++j)
    for (int a = 0; a < g.n_r(); ++a)
      f.data[j * g.n_r() + a] =
          std::sin(3 * kr * g.r(a)) + 0.5 * std::cos(5 * kr * g.r(a));
  const ComplexField df = spectral_gradient(f, 1);
  for (int j = 0; j < g.n_s(); ++j)
    for (int a = 0; a < g.n_r(); ++a) {
      const double ref = 3 * kr * std::cos(3 * kr * g.r(a)) -
                         2.5 * kr * std::sin(5 * kr * g.r(a));
      CHECK(std::abs(df.data[j * g.n_r() + a] - ref) < 1e-10);
    }
}

TEST_CASE("spectral gradient matches finite differences on a Gaussian") {
  PhaseGrid g = make_grid({1, 64, 16, 8.0, 4.0, 1.0});
  ComplexField f = make_field(g, {AxisKind::S, AxisKind::R});
  auto fn = [](double x) { return std::exp(-0.5 * x * x) * std::cos(x); };
  for (int j = 0; j < g.n_s(); ++j)
    for (int a = 0; a < g.n_r(); ++a) f.data[j * g.n_r() + a] = fn(g.r(a));
  const ComplexField df = spectral_gradient(f, 1);
  for (int a = 4; a < g.n_r() - 4; ++a) {
    const double ref = oracles::fd_deriv(fn, g.r(a), 1e-3);
    CHECK(std::abs(df.data[0 * g.n_r() + a] - ref) < 1e-8);
  }
}

TEST_CASE("boundary mass") {
  PhaseGrid g = make_grid({1, 16, 16, 4.0, 4.0, 1.0});
  ComplexField f = make_field(g, {AxisKind::R});
  f.data[8] = 1.0;
  CHECK(boundary_mass(f) == doctest::Approx(0.0));
  f.data[0] = 1.0;
  CHECK(boundary_mass(f) == doctest::Approx(0.5));
}
