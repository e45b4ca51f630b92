#include "giwe/transforms.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace giwe {

namespace {

constexpr double kBoundaryWarn = 1e-8;

std::vector<AxisKind> rho_axes(int d) {
  std::vector<AxisKind> ax(d, AxisKind::S);
  ax.insert(ax.end(), d, AxisKind::R);
  return ax;
}

double two_pi_hbar(const PhaseGrid& g) {
  return 2.0 * std::numbers::pi * g.hbar();
}

// Trig-interpolation matrix: rows indexed by (k_s, j_r) -> k*n_r + j,
// columns by mode; sign = +1 gives x = r_j + s_k/2, -1 the minus points.
Eigen::MatrixXcd half_shift_matrix(const PhaseGrid& g, int sign) {
  const int nr = g.n_r(), ns = g.n_s();
  Eigen::MatrixXcd E(ns * nr, nr);
  for (int k = 0; k < ns; ++k)
    for (int j = 0; j < nr; ++j) {
      const double x = g.r(j) + 0.5 * sign * g.s(k);
      const double jf = (x + g.L_r()) / g.dr();
      for (int m = 0; m < nr; ++m) {
        int ms = (m < nr / 2) ? m : m - nr;
        double arg = 2.0 * std::numbers::pi * jf * ms / nr;
        E(k * nr + j, m) = std::polar(1.0 / nr, arg);
      }
    }
  return E;
}

} // namespace

double Wavefunction::norm() const {
  double acc = 0.0;
  for (const auto& v : data) acc += std::norm(v);
  return acc * std::pow(grid->dr(), grid->dim());
}

double PhaseSpaceFunction::norm() const {
  double acc = 0.0;
  for (const auto& v : field.data) acc += v.real();
  const int d = grid_dim();
  return acc * std::pow(field.grid->dP(), d) * std::pow(field.grid->dr(), d);
}

double PhaseSpaceFunction::max_imag() const {
  double m = 0.0;
  for (const auto& v : field.data) m = std::max(m, std::abs(v.imag()));
  return m;
}

Wavefunction make_gaussian(const PhaseGrid& grid, const Vec& r0, const Vec& p0,
                           double sigma) {
  const int d = grid.dim(), n = grid.n_r();
  Wavefunction psi;
  psi.grid = &grid;
  psi.data.resize(d == 1 ? n : static_cast<std::size_t>(n) * n);
  const double hbar = grid.hbar();
  auto value = [&](const Vec& r) {
    double q2 = 0.0, ph = 0.0;
    for (int i = 0; i < d; ++i) {
      q2 += (r[i] - r0[i]) * (r[i] - r0[i]);
      ph += p0[i] * r[i] / hbar;
    }
    return std::polar(std::exp(-q2 / (4.0 * sigma * sigma)), ph);
  };
  if (d == 1) {
    for (int j = 0; j < n; ++j) psi.data[j] = value({grid.r(j), 0.0});
  } else {
    for (int jx = 0; jx < n; ++jx)
      for (int jy = 0; jy < n; ++jy)
        psi.data[static_cast<std::size_t>(jx) * n + jy] =
            value({grid.r(jx), grid.r(jy)});
  }
  const double nrm = std::sqrt(psi.norm());
  for (auto& v : psi.data) v /= nrm;
  return psi;
}

Wavefunction superpose(const Wavefunction& a, const Wavefunction& b, cplx ca,
                       cplx cb) {
  if (a.data.size() != b.data.size())
    throw std::invalid_argument("superpose: grid mismatch");
  Wavefunction out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = ca * a.data[i] + cb * b.data[i];
  const double nrm = std::sqrt(out.norm());
  for (auto& v : out.data) v /= nrm;
  return out;
}

DensityMatrix psi_to_rho(const Wavefunction& psi) {
  const PhaseGrid& g = *psi.grid;
  const int d = g.dim(), nr = g.n_r(), ns = g.n_s();

  ComplexField psif;
  psif.grid = &g;
  psif.axes.assign(d, AxisKind::R);
  psif.data = psi.data;
  if (double bm = boundary_mass(psif); bm > kBoundaryWarn)
    std::cerr << "[giwe] psi_to_rho: boundary mass " << bm
              << " exceeds 1e-8; periodic wrap error likely\n";

  // mode coefficients
  std::vector<cplx> hat = psi.data;
  std::vector<int> rshape(d, nr);
  for (int a = 0; a < d; ++a) detail::fft_axis(hat, rshape, a, -1);

  const Eigen::MatrixXcd Ep = half_shift_matrix(g, +1);
  const Eigen::MatrixXcd Em = half_shift_matrix(g, -1);

  DensityMatrix rho;
  rho.time = psi.time;
  rho.field = make_field(g, rho_axes(d));

  if (d == 1) {
    Eigen::Map<const Eigen::VectorXcd> h(hat.data(), nr);
    Eigen::VectorXcd plus = Ep * h, minus = Em * h;
    for (int t = 0; t < ns * nr; ++t)
      rho.field.data[t] = plus(t) * std::conj(minus(t));
  } else {
    Eigen::Map<const Eigen::MatrixXcd> h(hat.data(), nr, nr);
    // row-major data: hat[jx*nr + jy]; Eigen maps column-major, so the
    // mapped matrix is h(jy, jx) = hat[jx][jy]. Work with that transpose.
    // psi-hat over (mx, my): value_hat(my, mx) = h(my, mx).
    Eigen::MatrixXcd plus = Ep * h.transpose() * Ep.transpose();  // (kx jx, ky jy)
    Eigen::MatrixXcd minus = Em * h.transpose() * Em.transpose();
    for (int kx = 0; kx < ns; ++kx)
      for (int ky = 0; ky < ns; ++ky)
        for (int jx = 0; jx < nr; ++jx)
          for (int jy = 0; jy < nr; ++jy) {
            std::size_t flat =
                ((static_cast<std::size_t>(kx) * ns + ky) * nr + jx) * nr + jy;
            rho.field.data[flat] = plus(kx * nr + jx, ky * nr + jy) *
                                   std::conj(minus(kx * nr + jx, ky * nr + jy));
          }
  }
  return rho;
}

DensityMatrix mix(const std::vector<DensityMatrix>& parts,
                  const std::vector<double>& weights) {
  if (parts.empty() || parts.size() != weights.size())
    throw std::invalid_argument("mix: parts/weights mismatch");
  DensityMatrix out = parts[0];
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  for (auto& v : out.field.data) v *= weights[0] / wsum;
  for (std::size_t p = 1; p < parts.size(); ++p)
    for (std::size_t i = 0; i < out.field.data.size(); ++i)
      out.field.data[i] += weights[p] / wsum * parts[p].field.data[i];
  return out;
}

double hermiticity_error(const DensityMatrix& rho) {
  const ComplexField& f = rho.field;
  const PhaseGrid& g = *f.grid;
  const int d = g.dim(), nr = g.n_r(), ns = g.n_s();
  double peak = 0.0;
  for (const auto& v : f.data) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  double err = 0.0;
  auto flat = [&](int kx, int ky, int jx, int jy) {
    if (d == 1) return static_cast<std::size_t>(kx) * nr + jx;
    return ((static_cast<std::size_t>(kx) * ns + ky) * nr + jx) * nr + jy;
  };
  for (int kx = 0; kx < ns; ++kx)
    for (int ky = 0; ky < (d == 2 ? ns : 1); ++ky)
      for (int jx = 0; jx < nr; ++jx)
        for (int jy = 0; jy < (d == 2 ? nr : 1); ++jy) {
          int mx = (ns - kx) % ns, my = (ns - ky) % ns;
          cplx a = f.data[flat(kx, ky, jx, jy)];
          cplx b = f.data[flat(mx, my, jx, jy)];
          err = std::max(err, std::abs(a - std::conj(b)));
        }
  return err / peak;
}

double rho_trace(const DensityMatrix& rho) {
  const PhaseGrid& g = *rho.field.grid;
  const int d = g.dim(), nr = g.n_r(), ns = g.n_s();
  const int k0 = ns / 2; // s = 0 index
  double acc = 0.0;
  if (d == 1) {
    for (int j = 0; j < nr; ++j)
      acc += rho.field.data[static_cast<std::size_t>(k0) * nr + j].real();
  } else {
    for (int jx = 0; jx < nr; ++jx)
      for (int jy = 0; jy < nr; ++jy)
        acc += rho.field
                   .data[((static_cast<std::size_t>(k0) * ns + k0) * nr + jx) *
                             nr +
                         jy]
                   .real();
  }
  return acc * std::pow(g.dr(), d);
}

WsContext make_ws_context(const PhaseGrid& grid, const EMConfiguration& cfg,
                          const GaussLegendre& quad) {
  const int d = grid.dim(), nr = grid.n_r(), ns = grid.n_s();
  WsContext ctx;
  ctx.grid = &grid;
  ctx.phase = make_field(grid, rho_axes(d));
  const double hbar = grid.hbar();
  auto phase_at = [&](const Vec& s, const Vec& r) {
    Vec a = line_avg_A(cfg, r, s, quad);
    double arg = -cfg.q * (s[0] * a[0] + s[1] * a[1]) / hbar;
    return std::polar(1.0, arg);
  };
  if (d == 1) {
    for (int k = 0; k < ns; ++k)
      for (int j = 0; j < nr; ++j)
        ctx.phase.data[static_cast<std::size_t>(k) * nr + j] =
            phase_at({grid.s(k), 0.0}, {grid.r(j), 0.0});
  } else {
    for (int kx = 0; kx < ns; ++kx)
      for (int ky = 0; ky < ns; ++ky)
        for (int jx = 0; jx < nr; ++jx)
          for (int jy = 0; jy < nr; ++jy)
            ctx.phase.data[((static_cast<std::size_t>(kx) * ns + ky) * nr +
                            jx) *
                               nr +
                           jy] = phase_at({grid.s(kx), grid.s(ky)},
                                          {grid.r(jx), grid.r(jy)});
  }
  return ctx;
}

namespace {

PhaseSpaceFunction forward_transform(const ComplexField& rho_like, double time,
                                     PsfKind kind) {
  const PhaseGrid& g = *rho_like.grid;
  PhaseSpaceFunction out;
  out.kind = kind;
  out.time = time;
  out.field = dft_s_to_P(rho_like);
  const double c = std::pow(two_pi_hbar(g), -0.5 * g.dim());
  for (auto& v : out.field.data) v *= c;
  return out;
}

} // namespace

PhaseSpaceFunction weyl(const DensityMatrix& rho) {
  if (double e = hermiticity_error(rho); e > 1e-6)
    throw std::invalid_argument("weyl: density matrix not Hermitian (residue " +
                                std::to_string(e) + ")");
  return forward_transform(rho.field, rho.time, PsfKind::wigner);
}

DensityMatrix inv_weyl(const PhaseSpaceFunction& fw) {
  if (fw.kind != PsfKind::wigner)
    throw std::invalid_argument("inv_weyl: input must be a Wigner function");
  DensityMatrix rho;
  rho.time = fw.time;
  rho.field = idft_P_to_s(fw.field);
  const double c = std::pow(two_pi_hbar(*fw.field.grid), 0.5 * fw.grid_dim());
  for (auto& v : rho.field.data) v *= c;
  return rho;
}

PhaseSpaceFunction ws(const DensityMatrix& rho, const WsContext& ctx) {
  if (double e = hermiticity_error(rho); e > 1e-6)
    throw std::invalid_argument("ws: density matrix not Hermitian (residue " +
                                std::to_string(e) + ")");
  ComplexField tmp = rho.field;
  for (std::size_t i = 0; i < tmp.data.size(); ++i)
    tmp.data[i] *= ctx.phase.data[i];
  return forward_transform(tmp, rho.time, PsfKind::stratonovich);
}

DensityMatrix inv_ws(const PhaseSpaceFunction& Fs, const WsContext& ctx) {
  if (Fs.kind != PsfKind::stratonovich)
    throw std::invalid_argument("inv_ws: input must be a Stratonovich function");
  DensityMatrix rho;
  rho.time = Fs.time;
  rho.field = idft_P_to_s(Fs.field);
  const double c = std::pow(two_pi_hbar(*Fs.field.grid), 0.5 * Fs.grid_dim());
  for (std::size_t i = 0; i < rho.field.data.size(); ++i)
    rho.field.data[i] = rho.field.data[i] * c / ctx.phase.data[i];
  return rho;
}

PhaseSpaceFunction t_transform(const PhaseSpaceFunction& fw,
                               const WsContext& ctx) {
  if (fw.kind != PsfKind::wigner)
    throw std::invalid_argument("t_transform: input must be a Wigner function");
  DensityMatrix rho;
  rho.time = fw.time;
  rho.field = idft_P_to_s(fw.field);
  const double c = std::pow(two_pi_hbar(*fw.field.grid), 0.5 * fw.grid_dim());
  for (std::size_t i = 0; i < rho.field.data.size(); ++i)
    rho.field.data[i] = rho.field.data[i] * c * ctx.phase.data[i];
  return forward_transform(rho.field, fw.time, PsfKind::stratonovich);
}

PhaseSpaceFunction kinetic_shift(const PhaseSpaceFunction& fw,
                                 const EMConfiguration& cfg) {
  if (fw.kind != PsfKind::wigner)
    throw std::invalid_argument("kinetic_shift: input must be a Wigner function");
  const PhaseGrid& g = *fw.field.grid;
  const int d = g.dim(), nr = g.n_r(), ns = g.n_s();
  ComplexField rho = idft_P_to_s(fw.field);
  const double cw = std::pow(two_pi_hbar(g), 0.5 * d);
  const double hbar = g.hbar();
  auto shift_phase = [&](const Vec& s, const Vec& r) {
    Vec a = cfg.A ? cfg.A(r, fw.time) : Vec{0, 0};
    return std::polar(1.0, -cfg.q * (s[0] * a[0] + s[1] * a[1]) / hbar);
  };
  if (d == 1) {
    for (int k = 0; k < ns; ++k)
      for (int j = 0; j < nr; ++j)
        rho.data[static_cast<std::size_t>(k) * nr + j] *=
            cw * shift_phase({g.s(k), 0.0}, {g.r(j), 0.0});
  } else {
    for (int kx = 0; kx < ns; ++kx)
      for (int ky = 0; ky < ns; ++ky)
        for (int jx = 0; jx < nr; ++jx)
          for (int jy = 0; jy < nr; ++jy)
            rho.data[((static_cast<std::size_t>(kx) * ns + ky) * nr + jx) * nr +
                     jy] *= cw * shift_phase({g.s(kx), g.s(ky)},
                                             {g.r(jx), g.r(jy)});
  }
  return forward_transform(rho, fw.time, PsfKind::kinetic_shifted);
}

DensityMatrix gauge_phase_rho(const DensityMatrix& rho, const GaugeFunction& g,
                              double q) {
  const PhaseGrid& grid = *rho.field.grid;
  const int d = grid.dim(), nr = grid.n_r(), ns = grid.n_s();
  const double hbar = grid.hbar();
  DensityMatrix out = rho;
  auto phase = [&](const Vec& s, const Vec& r) {
    Vec rp{r[0] + 0.5 * s[0], r[1] + 0.5 * s[1]};
    Vec rm{r[0] - 0.5 * s[0], r[1] - 0.5 * s[1]};
    double dchi = g.chi(rp, rho.time) - g.chi(rm, rho.time);
    return std::polar(1.0, q * dchi / hbar);
  };
  if (d == 1) {
    for (int k = 0; k < ns; ++k)
      for (int j = 0; j < nr; ++j)
        out.field.data[static_cast<std::size_t>(k) * nr + j] *=
            phase({grid.s(k), 0.0}, {grid.r(j), 0.0});
  } else {
    for (int kx = 0; kx < ns; ++kx)
      for (int ky = 0; ky < ns; ++ky)
        for (int jx = 0; jx < nr; ++jx)
          for (int jy = 0; jy < nr; ++jy)
            out.field.data[((static_cast<std::size_t>(kx) * ns + ky) * nr +
                            jx) *
                               nr +
                           jy] *= phase({grid.s(kx), grid.s(ky)},
                                        {grid.r(jx), grid.r(jy)});
  }
  return out;
}

Wavefunction gauge_phase_psi(const Wavefunction& psi, const GaugeFunction& g,
                             double q) {
  const PhaseGrid& grid = *psi.grid;
  Wavefunction out = psi;
  const double hbar = grid.hbar();
  const int d = grid.dim(), n = grid.n_r();
  if (d == 1) {
    for (int j = 0; j < n; ++j)
      out.data[j] *=
          std::polar(1.0, q * g.chi({grid.r(j), 0.0}, psi.time) / hbar);
  } else {
    for (int jx = 0; jx < n; ++jx)
      for (int jy = 0; jy < n; ++jy)
        out.data[static_cast<std::size_t>(jx) * n + jy] *= std::polar(
            1.0, q * g.chi({grid.r(jx), grid.r(jy)}, psi.time) / hbar);
  }
  return out;
}

cplx eval_psi(const Wavefunction& psi, const Vec& point) {
  const PhaseGrid& g = *psi.grid;
  const int d = g.dim(), n = g.n_r();
  std::vector<cplx> hat = psi.data;
  std::vector<int> shape(d, n);
  for (int a = 0; a < d; ++a) detail::fft_axis(hat, shape, a, -1);
  auto mode = [&](int m, double x) {
    int ms = (m < n / 2) ? m : m - n;
    double jf = (x + g.L_r()) / g.dr();
    return std::polar(1.0 / n, 2.0 * std::numbers::pi * jf * ms / n);
  };
  cplx acc{0, 0};
  if (d == 1) {
    for (int m = 0; m < n; ++m) acc += hat[m] * mode(m, point[0]);
  } else {
    for (int mx = 0; mx < n; ++mx) {
      cplx fx = mode(mx, point[0]);
      for (int my = 0; my < n; ++my)
        acc += hat[static_cast<std::size_t>(mx) * n + my] * fx *
               mode(my, point[1]);
    }
  }
  return acc;
}

} // namespace giwe
