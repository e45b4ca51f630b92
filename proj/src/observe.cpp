#include "giwe/observe.hpp"

#include <cmath>
#include <stdexcept>

namespace giwe {

namespace {

std::size_t r_block(const PhaseGrid& g) {
  std::size_t R = 1;
  for (int i = 0; i < g.dim(); ++i) R *= g.n_r();
  return R;
}

// spectral d/dr_i of a real field on the r-grid
SpatialField div_component(const PhaseGrid& g, const SpatialField& f,
                           int axis) {
  ComplexField c;
  c.grid = &g;
  c.axes.assign(g.dim(), AxisKind::R);
  c.data.assign(f.begin(), f.end());
  const ComplexField dc = spectral_gradient(c, axis);
  SpatialField out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = dc.data[i].real();
  return out;
}

SpatialField divergence(const PhaseGrid& g,
                        const std::array<SpatialField, 2>& j) {
  SpatialField out = div_component(g, j[0], 0);
  if (g.dim() > 1) {
    const SpatialField dy = div_component(g, j[1], 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += dy[i];
  }
  return out;
}

double sup_abs(const ComplexField& f) {
  double m = 0.0;
  for (const cplx& v : f.data) m = std::max(m, std::abs(v));
  return m;
}

double sup_dev(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

} // namespace

SpatialField density(const PhaseSpaceFunction& Fs) {
  const PhaseGrid& g = *Fs.field.grid;
  const std::size_t R = r_block(g);
  const double meas = std::pow(g.dP(), g.dim());
  SpatialField out(R, 0.0);
  const std::size_t Np = Fs.field.size() / R;
  for (std::size_t pk = 0; pk < Np; ++pk)
    for (std::size_t rb = 0; rb < R; ++rb)
      out[rb] += Fs.field.data[pk * R + rb].real() * meas;
  return out;
}

std::array<SpatialField, 2> current_from_Fs(const PhaseSpaceFunction& Fs,
                                            double m) {
  const PhaseGrid& g = *Fs.field.grid;
  const int d = g.dim();
  const int n = g.n_s();
  const std::size_t R = r_block(g);
  const double meas = std::pow(g.dP(), d);
  std::array<SpatialField, 2> out{SpatialField(R, 0.0), SpatialField(R, 0.0)};
  const std::size_t Np = Fs.field.size() / R;
  for (std::size_t pk = 0; pk < Np; ++pk) {
    Vec P{0, 0};
    if (d == 1) {
      P[0] = g.P(static_cast<int>(pk));
    } else {
      P[0] = g.P(static_cast<int>(pk / n));
      P[1] = g.P(static_cast<int>(pk % n));
    }
    for (std::size_t rb = 0; rb < R; ++rb) {
      const double v = Fs.field.data[pk * R + rb].real() * meas / m;
      out[0][rb] += P[0] * v;
      if (d > 1) out[1][rb] += P[1] * v;
    }
  }
  return out;
}

std::array<SpatialField, 2> current_from_psi(const Wavefunction& psi,
                                             const EMConfiguration& cfg,
                                             double t) {
  const PhaseGrid& g = *psi.grid;
  const int d = g.dim();
  const double hbar = g.hbar();
  ComplexField c;
  c.grid = &g;
  c.axes.assign(d, AxisKind::R);
  c.data = psi.data;
  std::array<SpatialField, 2> out{SpatialField(psi.data.size(), 0.0),
                                  SpatialField(psi.data.size(), 0.0)};
  for (int i = 0; i < d; ++i) {
    const ComplexField dpsi = spectral_gradient(c, i);
    for (std::size_t j = 0; j < psi.data.size(); ++j)
      out[i][j] = hbar / cfg.m *
                  std::imag(std::conj(psi.data[j]) * dpsi.data[j]);
  }
  if (cfg.A) {
    const int n = g.n_r();
    for (std::size_t j = 0; j < psi.data.size(); ++j) {
      Vec r{0, 0};
      if (d == 1) {
        r[0] = g.r(static_cast<int>(j));
      } else {
        r[0] = g.r(static_cast<int>(j / n));
        r[1] = g.r(static_cast<int>(j % n));
      }
      const Vec A = cfg.A(r, t);
      const double w = cfg.q / cfg.m * std::norm(psi.data[j]);
      for (int i = 0; i < d; ++i) out[i][j] -= w * A[i];
    }
  }
  return out;
}

std::vector<double> continuity_residual(const Trajectory& traj, double m) {
  if (traj.snapshots.size() < 3)
    throw std::invalid_argument(
        "continuity_residual: need at least 3 snapshots");
  const PhaseGrid& g = *traj.snapshots.front().field.grid;
  const double meas = std::pow(g.dr(), g.dim());
  const double eps = 1e-14;
  std::vector<double> out;
  for (std::size_t k = 1; k + 1 < traj.snapshots.size(); ++k) {
    const SpatialField pa = density(traj.snapshots[k - 1]);
    const SpatialField pb = density(traj.snapshots[k + 1]);
    const double dt2 = traj.times[k + 1] - traj.times[k - 1];
    const SpatialField div =
        divergence(g, current_from_Fs(traj.snapshots[k], m));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < div.size(); ++i) {
      const double r = (pb[i] - pa[i]) / dt2 + div[i];
      num += r * r;
      den += div[i] * div[i];
    }
    out.push_back(std::sqrt(num * meas) / (std::sqrt(den * meas) + eps));
  }
  return out;
}

GaugeDeviation gauge_deviation(const Wavefunction& psi,
                               const EMConfiguration& cfg,
                               const GaugeFunction& chi,
                               const GaussLegendre& quad) {
  const PhaseGrid& g = *psi.grid;
  const EMConfiguration cfg2 = gauge_transform(cfg, chi);
  const Wavefunction psi2 = gauge_phase_psi(psi, chi, cfg.q);

  const DensityMatrix rho = psi_to_rho(psi);
  const DensityMatrix rho2 = psi_to_rho(psi2);

  const WsContext ctx = make_ws_context(g, cfg, quad);
  const WsContext ctx2 = make_ws_context(g, cfg2, quad);
  const PhaseSpaceFunction Fs1 = ws(rho, ctx);
  const PhaseSpaceFunction Fs2 = ws(rho2, ctx2);

  const PhaseSpaceFunction Fw1 = kinetic_shift(weyl(rho), cfg);
  const PhaseSpaceFunction Fw2 = kinetic_shift(weyl(rho2), cfg2);

  GaugeDeviation dev;
  const double ref_s = sup_abs(Fs1.field);
  const double ref_w = sup_abs(Fw1.field);
  dev.fs = sup_dev(Fs1.field, Fs2.field) / (ref_s > 0 ? ref_s : 1.0);
  dev.fw = sup_dev(Fw1.field, Fw2.field) / (ref_w > 0 ? ref_w : 1.0);
  return dev;
}

std::vector<DiagnosticsReport> diagnose(const Trajectory& traj, double m) {
  std::vector<DiagnosticsReport> out;
  std::vector<double> resid;
  if (traj.snapshots.size() >= 3) resid = continuity_residual(traj, m);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    DiagnosticsReport rep;
    rep.time = traj.times[k];
    rep.norm = traj.norms[k];
    rep.boundary_mass = traj.boundary_mass[k];
    rep.density = density(traj.snapshots[k]);
    rep.current = current_from_Fs(traj.snapshots[k], m);
    if (k >= 1 && k + 1 < traj.snapshots.size()) rep.continuity_l2 = resid[k - 1];
    out.push_back(std::move(rep));
  }
  return out;
}

} // namespace giwe
