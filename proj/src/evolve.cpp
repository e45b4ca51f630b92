#include "giwe/evolve.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace giwe {

namespace {

std::vector<std::size_t> strides_of(const std::vector<int>& shape) {
  std::vector<std::size_t> st(shape.size());
  std::size_t acc = 1;
  for (int i = static_cast<int>(shape.size()) - 1; i >= 0; --i) {
    st[i] = acc;
    acc *= shape[i];
  }
  return st;
}

double sup_norm(const ComplexField& f) {
  double m = 0.0;
  for (const cplx& v : f.data) m = std::max(m, std::abs(v));
  return m;
}

// Exact free streaming exp(-dt (P/m).grad_r) via the r-axis Fourier modes.
void stream(ComplexField& F, double dt, double m) {
  const PhaseGrid& g = *F.grid;
  const int d = g.dim();
  const auto shape = F.shape();
  const auto st = strides_of(shape);
  for (int a = d; a < 2 * d; ++a) detail::fft_axis(F.data, shape, a, -1);
  for (std::size_t i = 0; i < F.data.size(); ++i) {
    double kP = 0.0;
    for (int a = 0; a < d; ++a) {
      const int km = static_cast<int>(i / st[d + a] % shape[d + a]);
      const int kp = static_cast<int>(i / st[a] % shape[a]);
      kP += PhaseGrid::wavenumber(km, g.n_r(), g.dr()) * g.P(kp);
    }
    F.data[i] *= std::polar(1.0, -kP * dt / m);
  }
  for (int a = d; a < 2 * d; ++a) detail::fft_axis(F.data, shape, a, 1);
  const double scale = 1.0 / std::pow(static_cast<double>(g.n_r()), d);
  for (cplx& v : F.data) v *= scale;
}

void field_axpy(ComplexField& y, const ComplexField& x, double a) {
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

double psi_boundary_mass(const Wavefunction& psi) {
  ComplexField f;
  f.grid = psi.grid;
  f.axes.assign(psi.grid->dim(), AxisKind::R);
  f.data = psi.data;
  return boundary_mass(f);
}

void log_snapshot(Trajectory& tr, const PhaseSpaceFunction& F) {
  tr.times.push_back(F.time);
  tr.snapshots.push_back(F);
  tr.norms.push_back(F.norm());
  tr.boundary_mass.push_back(boundary_mass(F.field));
}

void cfl_warning(const PhaseGrid& g, double dt, double m) {
  const double P_max = 0.5 * g.n_s() * g.dP();
  const double c = dt * P_max / (m * g.dr());
  if (c > 0.5)
    std::cerr << "evolve: warning: advection number " << c
              << " exceeds 0.5; reduce dt\n";
}

int step_count(const EvolutionConfig& evo) {
  if (evo.dt <= 0.0) throw std::invalid_argument("evolve: dt must be > 0");
  return std::max(1, static_cast<int>(std::llround(evo.t_final / evo.dt)));
}

// ---- Crank-Nicolson machinery -------------------------------------------

// Dense spectral differentiation matrix of the given order on a periodic
// axis (Nyquist mode annihilated, matching spectral_gradient).
Eigen::MatrixXd spectral_D(int n, double h, int order) {
  Eigen::MatrixXcd D(n, n);
  const cplx I(0.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      cplx acc(0.0, 0.0);
      for (int m = 0; m < n; ++m) {
        const double k = PhaseGrid::wavenumber(m, n, h);
        const cplx sym = order == 1 ? I * k : cplx(-k * k, 0.0);
        acc += sym * std::polar(1.0, 2.0 * std::numbers::pi * m *
                                         static_cast<double>(j - l) / n);
      }
      D(j, l) = acc / static_cast<double>(n);
    }
  return D.real();
}

Eigen::MatrixXcd build_hamiltonian(const PhaseGrid& grid,
                                   const EMConfiguration& cfg, double t) {
  const int d = grid.dim();
  const int n = grid.n_r();
  const double hbar = grid.hbar(), q = cfg.q, m = cfg.m;
  const Eigen::MatrixXd D1 = spectral_D(n, grid.dr(), 1);
  const Eigen::MatrixXd D2 = spectral_D(n, grid.dr(), 2);
  const cplx I(0.0, 1.0);

  const int N = d == 1 ? n : n * n;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(N, N);

  auto r_of = [&](int idx) {
    if (d == 1) return Vec{grid.r(idx), 0.0};
    return Vec{grid.r(idx / n), grid.r(idx % n)};
  };
  auto A_of = [&](int idx) {
    return cfg.A ? cfg.A(r_of(idx), t) : Vec{0.0, 0.0};
  };

  for (int j = 0; j < N; ++j) {
    for (int l = 0; l < N; ++l) {
      double lap = 0.0;
      std::array<double, 2> Dval{0.0, 0.0};
      if (d == 1) {
        lap = D2(j, l);
        Dval[0] = D1(j, l);
      } else {
        const int jx = j / n, jy = j % n, lx = l / n, ly = l % n;
        if (jy == ly) {
          lap += D2(jx, lx);
          Dval[0] = D1(jx, lx);
        }
        if (jx == lx) lap += D2(jy, ly);
        if (jx == lx) Dval[1] = D1(jy, ly);
      }
      cplx h = cplx(-hbar * hbar / (2.0 * m) * lap, 0.0);
      const Vec Aj = A_of(j), Al = A_of(l);
      for (int i = 0; i < d; ++i)
        h += -I * hbar * q / (2.0 * m) * (Aj[i] + Al[i]) * Dval[i];
      H(j, l) += h;
    }
    const Vec r = r_of(j);
    const Vec A = A_of(j);
    const double phi = cfg.phi ? cfg.phi(r, t) : 0.0;
    H(j, j) += q * q * (A[0] * A[0] + A[1] * A[1]) / (2.0 * m) + q * phi;
  }
  return H;
}

void renormalize(Wavefunction& psi) {
  const double n = psi.norm();
  if (n <= 0.0) throw std::runtime_error("evolve: wavefunction vanished");
  const double s = 1.0 / std::sqrt(n);
  for (cplx& v : psi.data) v *= s;
}

} // namespace

void step_weak_giwe(PhaseSpaceFunction& Fs, const KernelSet& K, double dt) {
  const double before = sup_norm(Fs.field);
  stream(Fs.field, 0.5 * dt, K.m);
  if (K.has_electric || K.has_magnetic) {
    const PhaseSpaceFunction k1 = apply_weak_rhs(Fs, K);
    PhaseSpaceFunction tmp = Fs;
    field_axpy(tmp.field, k1.field, 0.5 * dt);
    const PhaseSpaceFunction k2 = apply_weak_rhs(tmp, K);
    tmp = Fs;
    field_axpy(tmp.field, k2.field, 0.5 * dt);
    const PhaseSpaceFunction k3 = apply_weak_rhs(tmp, K);
    tmp = Fs;
    field_axpy(tmp.field, k3.field, dt);
    const PhaseSpaceFunction k4 = apply_weak_rhs(tmp, K);
    field_axpy(Fs.field, k1.field, dt / 6.0);
    field_axpy(Fs.field, k2.field, dt / 3.0);
    field_axpy(Fs.field, k3.field, dt / 3.0);
    field_axpy(Fs.field, k4.field, dt / 6.0);
  }
  stream(Fs.field, 0.5 * dt, K.m);
  Fs.time += dt;
  if (before > 0.0 && sup_norm(Fs.field) > 10.0 * before)
    throw std::runtime_error(
        "step_weak_giwe: sup-norm grew more than 10x in one step");
}

Trajectory evolve_weak_giwe(const PhaseSpaceFunction& F0, const KernelSet& K,
                            const EvolutionConfig& evo) {
  cfl_warning(*F0.field.grid, evo.dt, K.m);
  const int nsteps = step_count(evo);
  Trajectory tr;
  PhaseSpaceFunction F = F0;
  log_snapshot(tr, F);
  for (int s = 1; s <= nsteps; ++s) {
    step_weak_giwe(F, K, evo.dt);
    if (s % std::max(1, evo.stride) == 0 || s == nsteps) log_snapshot(tr, F);
  }
  return tr;
}

Trajectory evolve_schrodinger(const Wavefunction& psi0,
                              const EMConfiguration& cfg,
                              const EvolutionConfig& evo) {
  const PhaseGrid& grid = *psi0.grid;
  const double hbar = grid.hbar();
  const int nsteps = step_count(evo);
  const int N = static_cast<int>(psi0.data.size());

  const Eigen::MatrixXcd H = build_hamiltonian(grid, cfg, 0.0);
  const cplx a(0.0, evo.dt / (2.0 * hbar));
  const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(N, N);
  const Eigen::MatrixXcd Mminus = Id - a * H;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Id + a * H);

  Trajectory tr;
  Wavefunction psi = psi0;
  auto log_psi = [&](const Wavefunction& p) {
    tr.times.push_back(p.time);
    tr.psis.push_back(p);
    tr.norms.push_back(p.norm());
    tr.boundary_mass.push_back(psi_boundary_mass(p));
  };
  log_psi(psi);
  Eigen::VectorXcd v =
      Eigen::Map<const Eigen::VectorXcd>(psi.data.data(), N);
  for (int s = 1; s <= nsteps; ++s) {
    v = lu.solve(Mminus * v);
    psi.time += evo.dt;
    if (s % std::max(1, evo.stride) == 0 || s == nsteps) {
      Eigen::Map<Eigen::VectorXcd>(psi.data.data(), N) = v;
      log_psi(psi);
    }
  }
  return tr;
}

Trajectory gauge_dependent_reference(const Wavefunction& psi0,
                                     const EMConfiguration& cfg,
                                     const EvolutionConfig& evo) {
  Trajectory tr = evolve_schrodinger(psi0, cfg, evo);
  for (const Wavefunction& p : tr.psis) {
    PhaseSpaceFunction fw = weyl(psi_to_rho(p));
    fw.time = p.time;
    tr.snapshots.push_back(std::move(fw));
  }
  return tr;
}

Trajectory evolve_liouville(
    const PhaseSpaceFunction& F0, const EMConfiguration& cfg,
    const EvolutionConfig& evo,
    std::function<cplx(const Vec& P, const Vec& r)> F0_eval) {
  const PhaseGrid& g = *F0.field.grid;
  const int d = g.dim();
  cfl_warning(g, evo.dt, cfg.m);
  const int nsteps = step_count(evo);

  const auto shape = F0.field.shape();
  const auto st = strides_of(shape);
  const std::size_t N = F0.field.size();

  // characteristic feet, advanced backward through the static flow
  std::vector<Vec> footP(N), footR(N);
  for (std::size_t i = 0; i < N; ++i) {
    Vec P{0, 0}, r{0, 0};
    for (int a = 0; a < d; ++a) {
      P[a] = g.P(static_cast<int>(i / st[a] % shape[a]));
      r[a] = g.r(static_cast<int>(i / st[d + a] % shape[d + a]));
    }
    footP[i] = P;
    footR[i] = r;
  }

  // spectral coefficients for the interpolation fallback
  std::vector<cplx> hat;
  if (!F0_eval) {
    hat = F0.field.data;
    for (std::size_t a = 0; a < shape.size(); ++a)
      detail::fft_axis(hat, shape, static_cast<int>(a), -1);
  }
  auto interp = [&](const Vec& P, const Vec& r) -> cplx {
    // per-axis trigonometric factors; the Nyquist mode contributes a cosine
    std::vector<std::vector<cplx>> fac(shape.size());
    for (std::size_t a = 0; a < shape.size(); ++a) {
      const int n = shape[a];
      const bool is_p = a < static_cast<std::size_t>(d);
      const double x = is_p ? P[a] : r[a - d];
      const double x0 = is_p ? g.P(0) : g.r(0);
      const double h = is_p ? g.dP() : g.dr();
      const double u = (x - x0) / h;
      fac[a].resize(n);
      for (int m = 0; m < n; ++m) {
        if (m == n / 2) {
          fac[a][m] = cplx(std::cos(std::numbers::pi * u), 0.0);
        } else {
          const int ms = m <= n / 2 ? m : m - n;
          fac[a][m] =
              std::polar(1.0, 2.0 * std::numbers::pi * ms * u / n);
        }
      }
    }
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      cplx w = hat[i];
      for (std::size_t a = 0; a < shape.size(); ++a)
        w *= fac[a][i / st[a] % shape[a]];
      acc += w;
    }
    return acc / static_cast<double>(N);
  };

  bool warned = false;
  auto emit = [&](double t, Trajectory& tr) {
    PhaseSpaceFunction F;
    F.kind = F0.kind;
    F.time = t;
    F.field = make_field(g, F0.field.axes);
    for (std::size_t i = 0; i < N; ++i) {
      if (!warned && (std::abs(footR[i][0]) > g.L_r() ||
                      (d > 1 && std::abs(footR[i][1]) > g.L_r()))) {
        std::cerr << "evolve_liouville: warning: characteristic foot left "
                     "the domain; wrapping periodically\n";
        warned = true;
      }
      F.field.data[i] =
          F0_eval ? F0_eval(footP[i], footR[i]) : interp(footP[i], footR[i]);
    }
    log_snapshot(tr, F);
  };

  auto force = [&](const Vec& P, const Vec& r, Vec& dr, Vec& dP) {
    dr = Vec{P[0] / cfg.m, d > 1 ? P[1] / cfg.m : 0.0};
    dP = cfg.lorentz(P, r, 0.0);
    if (d == 1) {
      dr[1] = 0.0;
      dP[1] = 0.0;
    }
  };

  Trajectory tr;
  emit(F0.time, tr);
  const double h = -evo.dt; // backward in time
  for (int s = 1; s <= nsteps; ++s) {
    for (std::size_t i = 0; i < N; ++i) {
      Vec r = footR[i], P = footP[i];
      Vec k1r, k1p, k2r, k2p, k3r, k3p, k4r, k4p;
      force(P, r, k1r, k1p);
      force({P[0] + 0.5 * h * k1p[0], P[1] + 0.5 * h * k1p[1]},
            {r[0] + 0.5 * h * k1r[0], r[1] + 0.5 * h * k1r[1]}, k2r, k2p);
      force({P[0] + 0.5 * h * k2p[0], P[1] + 0.5 * h * k2p[1]},
            {r[0] + 0.5 * h * k2r[0], r[1] + 0.5 * h * k2r[1]}, k3r, k3p);
      force({P[0] + h * k3p[0], P[1] + h * k3p[1]},
            {r[0] + h * k3r[0], r[1] + h * k3r[1]}, k4r, k4p);
      for (int a = 0; a < 2; ++a) {
        footR[i][a] =
            r[a] + h / 6.0 * (k1r[a] + 2 * k2r[a] + 2 * k3r[a] + k4r[a]);
        footP[i][a] =
            P[a] + h / 6.0 * (k1p[a] + 2 * k2p[a] + 2 * k3p[a] + k4p[a]);
      }
    }
    if (s % std::max(1, evo.stride) == 0 || s == nsteps)
      emit(F0.time + s * evo.dt, tr);
  }
  return tr;
}

Wavefunction ground_state(const PhaseGrid& grid, const EMConfiguration& cfg,
                          double tau_step, int max_iter, double tol) {
  const double hbar = grid.hbar();
  const Eigen::MatrixXcd H = build_hamiltonian(grid, cfg, 0.0);
  const int N = static_cast<int>(H.rows());
  const double a = tau_step / (2.0 * hbar);
  const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(N, N);
  const Eigen::MatrixXcd Mminus = Id - a * H;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Id + a * H);

  Wavefunction psi = make_gaussian(grid, {0.1, 0.05}, {0, 0}, 1.0);
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(psi.data.data(), N);
  double energy_prev = 1e300;
  const double meas = std::pow(grid.dr(), grid.dim());
  for (int it = 0; it < max_iter; ++it) {
    v = lu.solve(Mminus * v);
    v /= std::sqrt(v.squaredNorm() * meas);
    if (it % 10 == 9 || it == max_iter - 1) {
      const double e = (v.adjoint() * (H * v)).real()(0, 0) * meas;
      if (std::abs(e - energy_prev) < tol) break;
      energy_prev = e;
    }
  }
  Eigen::Map<Eigen::VectorXcd>(psi.data.data(), N) = v;
  renormalize(psi);
  return psi;
}

} // namespace giwe
