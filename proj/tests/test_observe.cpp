#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "giwe/observe.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <numbers>

using namespace giwe;

TEST_CASE("density of a phase-space image is the position density") {
  PhaseGrid g = make_grid({1, 64, 64, 8.0, 8.0, 1.0});
  Wavefunction psi = make_gaussian(g, {0.4, 0}, {0.7, 0}, 1.0);
  SpatialField rho = density(weyl(psi_to_rho(psi)));
  double total = 0, dev = 0;
  for (int a = 0; a < g.n_r(); ++a) {
    dev = std::max(dev, std::abs(rho[a] - std::norm(psi.data[a])));
    total += rho[a] * g.dr();
  }
  CHECK(dev < 1e-8);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("current densities: plane-wave packet and minimal coupling") {
  PhaseGrid g = make_grid({1, 64, 64, 8.0, 8.0, 1.0});
  EMConfiguration free_cfg = scenarios::free_particle(1);

  // real wavefunction carries no current
  Wavefunction still = make_gaussian(g, {0.0, 0}, {0.0, 0}, 1.0);
  auto j0 = current_from_psi(still, free_cfg);
  double m0 = 0;
  for (double v : j0[0]) m0 = std::max(m0, std::abs(v));
  CHECK(m0 < 1e-12);

  // boosted packet: j = (hbar k / m) |psi|^2
  const double k0 = 2 * std::numbers::pi / (2 * g.L_r()) * 4; // grid mode
  Wavefunction moving = make_gaussian(g, {0.0, 0}, {k0, 0}, 1.0);
  auto j1 = current_from_psi(moving, free_cfg);
  double dev = 0;
  for (int a = 0; a < g.n_r(); ++a)
    dev = std::max(dev, std::abs(j1[0][a] - k0 * std::norm(moving.data[a])));
  CHECK(dev < 1e-8);

  // uniform A shifts the velocity by -qA/m
  EMConfiguration withA = free_cfg;
  withA.q = 1.2;
  withA.A = [](const Vec&, double) { return Vec{0.6, 0.0}; };
  auto j2 = current_from_psi(moving, withA);
  dev = 0;
  for (int a = 0; a < g.n_r(); ++a)
    dev = std::max(dev, std::abs(j2[0][a] - (k0 - 1.2 * 0.6) *
                                                std::norm(moving.data[a])));
  CHECK(dev < 1e-8);
}

TEST_CASE("gauge-invariant current agrees with the wavefunction current") {
  // For the gauge-invariant image, sum_P (P/m) F equals the physical current
  // of the underlying state.
  PhaseGrid g = make_grid({1, 64, 64, 8.0, 8.0, 1.0});
  EMConfiguration cfg = scenarios::free_particle(1);
  cfg.q = 1.0;
  cfg.A = [](const Vec& r, double) { return Vec{0.2 * r[0], 0.0}; };
  cfg.dA = [](const Vec&, double) { return Mat{{{0.2, 0}, {0, 0}}}; };
  GaussLegendre quad(16);
  Wavefunction psi = make_gaussian(g, {0.0, 0}, {0.8, 0}, 1.0);
  WsContext ctx = make_ws_context(g, cfg, quad);
  PhaseSpaceFunction Fs = ws(psi_to_rho(psi), ctx);
  auto jF = current_from_Fs(Fs, cfg.m);
  auto jP = current_from_psi(psi, cfg);
  double dev = 0;
  for (int a = 4; a < g.n_r() - 4; ++a)
    dev = std::max(dev, std::abs(jF[0][a] - jP[0][a]));
  CHECK(dev < 1e-6);
}

TEST_CASE("wavefunction current is gauge-invariant") {
  PhaseGrid g = make_grid({1, 64, 16, 8.0, 8.0, 1.0});
  EMConfiguration cfg = scenarios::free_particle(1);
  cfg.q = 1.4;
  GaugeFunction gf;
  gf.chi = [](const Vec& r, double) { return 0.3 * r[0] * r[0]; };
  gf.grad_chi = [](const Vec& r, double) { return Vec{0.6 * r[0], 0.0}; };
  gf.hess_chi = [](const Vec&, double) { return Mat{{{0.6, 0}, {0, 0}}}; };
  gf.dchi_dt = [](const Vec&, double) { return 0.0; };

  Wavefunction psi = make_gaussian(g, {0.2, 0}, {0.5, 0}, 1.0);
  auto j1 = current_from_psi(psi, cfg);
  auto j2 = current_from_psi(gauge_phase_psi(psi, gf, cfg.q),
                             gauge_transform(cfg, gf));
  double dev = 0;
  for (int a = 4; a < g.n_r() - 4; ++a)
    dev = std::max(dev, std::abs(j1[0][a] - j2[0][a]));
  CHECK(dev < 1e-8);
}

TEST_CASE("continuity residual shrinks ~4x when dt is halved") {
  PhaseGrid g = make_grid({1, 48, 64, 8.0, 8.0, 1.0});
  GaussLegendre quad(8);
  EMConfiguration cfg = scenarios::uniform_E(1, {0.4, 0});
  KernelSet k = build_kernels(cfg, g, quad);
  PhaseSpaceFunction F0 = weyl(psi_to_rho(make_gaussian(g, {0, 0}, {0.4, 0},
                                                        1.0)));
  auto run = [&](double dt) {
    EvolutionConfig evo{.dt = dt, .t_final = 0.4, .stride = 4};
    Trajectory traj = evolve_weak_giwe(F0, k, evo);
    const std::vector<double> res = continuity_residual(traj, cfg.m);
    double worst = 0;
    for (double v : res) worst = std::max(worst, v);
    return worst;
  };
  const double coarse = run(0.05), fine = run(0.025);
  CHECK(coarse < 1e-3);
  CHECK(coarse / fine > 2.8); // centered-difference residual is O(dt^2)
}

TEST_CASE("continuity residual needs at least three snapshots") {
  Trajectory traj;
  traj.times = {0.0, 0.1};
  CHECK_THROWS(continuity_residual(traj, 1.0));
}

TEST_CASE("gauge deviation: invariant image vs kinetic-shifted image") {
  PhaseGrid g = make_grid({1, 48, 48, 8.0, 8.0, 1.0});
  GaussLegendre quad(16);
  EMConfiguration cfg = scenarios::free_particle(1);
  cfg.q = 1.0;
  cfg.A = [](const Vec& r, double) { return Vec{0.3 * r[0], 0.0}; };
  cfg.dA = [](const Vec&, double) { return Mat{{{0.3, 0}, {0, 0}}}; };
  Wavefunction psi = make_gaussian(g, {0.0, 0}, {0.5, 0}, 1.0);

  GaugeFunction zero = GaugeFunction::zero();
  GaugeDeviation d0 = gauge_deviation(psi, cfg, zero, quad);
  CHECK(d0.fs < 1e-12);
  CHECK(d0.fw < 1e-12);

  GaugeFunction gf;
  gf.chi = [](const Vec& r, double) { return 0.25 * r[0] * r[0]; };
  gf.grad_chi = [](const Vec& r, double) { return Vec{0.5 * r[0], 0.0}; };
  gf.hess_chi = [](const Vec&, double) { return Mat{{{0.5, 0}, {0, 0}}}; };
  gf.dchi_dt = [](const Vec&, double) { return 0.0; };
  GaugeDeviation d1 = gauge_deviation(psi, cfg, gf, quad);
  CHECK(d1.fs < 1e-7);
  CHECK(d1.fw > 1e-2);
}

TEST_CASE("diagnostics reports are consistent with their parts") {
  PhaseGrid g = make_grid({1, 32, 32, 6.0, 6.0, 1.0});
  GaussLegendre quad(8);
  EMConfiguration cfg = scenarios::uniform_E(1, {0.3, 0});
  KernelSet k = build_kernels(cfg, g, quad);
  PhaseSpaceFunction F0 = weyl(psi_to_rho(make_gaussian(g, {0, 0}, {0.2, 0},
                                                        1.0)));
  EvolutionConfig evo{.dt = 0.02, .t_final = 0.2, .stride = 2};
  Trajectory traj = evolve_weak_giwe(F0, k, evo);
  std::vector<DiagnosticsReport> reps = diagnose(traj, cfg.m);
  REQUIRE(reps.size() == traj.snapshots.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    CHECK(reps[i].time == doctest::Approx(traj.times[i]));
    CHECK(reps[i].norm == doctest::Approx(traj.norms[i]));
    const SpatialField rho = density(traj.snapshots[i]);
    for (int a = 0; a < g.n_r(); ++a)
      CHECK(reps[i].density[a] == doctest::Approx(rho[a]));
  }
  CHECK(reps.front().continuity_l2 == 0.0);
  CHECK(reps.back().continuity_l2 == 0.0);
}
