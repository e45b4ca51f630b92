#include "giwe/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace giwe {

PhaseGrid::PhaseGrid(const GridSpec& spec) : spec_(spec) {
  if (spec.dim != 1 && spec.dim != 2)
    throw std::invalid_argument("PhaseGrid: dim must be 1 or 2");
  if (spec.n_s % 2 != 0 || spec.n_s < 8)
    throw std::invalid_argument("PhaseGrid: n_s must be even and >= 8");
  if (spec.n_r < 8)
    throw std::invalid_argument("PhaseGrid: n_r must be >= 8");
  if (spec.L_r <= 0 || spec.L_s <= 0)
    throw std::invalid_argument("PhaseGrid: extents must be positive");
  if (spec.hbar <= 0)
    throw std::invalid_argument("PhaseGrid: hbar must be positive");
  dr_ = 2.0 * spec.L_r / spec.n_r;
  ds_ = 2.0 * spec.L_s / spec.n_s;
  dP_ = 2.0 * std::numbers::pi * spec.hbar / (spec.n_s * ds_);
}

double PhaseGrid::wavenumber(int m, int n, double dx) {
  int ms = (m < n / 2) ? m : m - n;
  if (m == n / 2) ms = 0; // Nyquist mode carries no odd derivative
  return 2.0 * std::numbers::pi * ms / (n * dx);
}

double PhaseGrid::k_r(int m) const { return wavenumber(m, spec_.n_r, dr_); }

PhaseGrid make_grid(const GridSpec& spec) { return PhaseGrid(spec); }

int ComplexField::axis_size(int i) const {
  return axes[i] == AxisKind::R ? grid->n_r() : grid->n_s();
}

std::vector<int> ComplexField::shape() const {
  std::vector<int> sh(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i)
    sh[i] = axis_size(static_cast<int>(i));
  return sh;
}

ComplexField make_field(const PhaseGrid& grid, std::vector<AxisKind> axes) {
  ComplexField f;
  f.grid = &grid;
  f.axes = std::move(axes);
  std::size_t n = 1;
  for (std::size_t i = 0; i < f.axes.size(); ++i)
    n *= static_cast<std::size_t>(f.axis_size(static_cast<int>(i)));
  f.data.assign(n, cplx{0.0, 0.0});
  return f;
}

namespace detail {

namespace {

// One cached FFTW plan pair per transform length, executed on an owned
// scratch buffer; lines are gathered/scattered around it.
struct PlanEntry {
  fftw_plan fwd = nullptr, bwd = nullptr;
  fftw_complex* buf = nullptr;
};

PlanEntry& plan_for(int n) {
  static std::map<int, PlanEntry> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanEntry e;
  e.buf = fftw_alloc_complex(static_cast<std::size_t>(n));
  e.fwd = fftw_plan_dft_1d(n, e.buf, e.buf, FFTW_FORWARD, FFTW_ESTIMATE);
  e.bwd = fftw_plan_dft_1d(n, e.buf, e.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, e).first->second;
}

} // namespace

void fft_axis(std::vector<cplx>& data, std::span<const int> shape, int axis,
              int sign) {
  const int ndim = static_cast<int>(shape.size());
  const int n = shape[axis];
  std::size_t stride = 1;
  for (int i = axis + 1; i < ndim; ++i) stride *= shape[i];
  std::size_t outer = 1;
  for (int i = 0; i < axis; ++i) outer *= shape[i];
  const std::size_t block = stride * static_cast<std::size_t>(n);

  PlanEntry& plan = plan_for(n);
  auto* buf = reinterpret_cast<cplx*>(plan.buf);
  for (std::size_t o = 0; o < outer; ++o) {
    cplx* base = data.data() + o * block;
    for (std::size_t inner = 0; inner < stride; ++inner) {
      cplx* line = base + inner;
      for (int j = 0; j < n; ++j) buf[j] = line[j * stride];
      fftw_execute(sign < 0 ? plan.fwd : plan.bwd);
      for (int j = 0; j < n; ++j) line[j * stride] = buf[j];
    }
  }
}

} // namespace detail

namespace {

// Centered-grid phase fixups: with s_j = (j - n/2) ds and P_k = (k - n/2) dP,
// the kernel exp(-i s.P/hbar) maps onto a plain FFT after (-1)^j / (-1)^k
// modulation and a global (-1)^{n/2} factor.
void modulate_axis(std::vector<cplx>& data, std::span<const int> shape,
                   int axis, double extra) {
  const int ndim = static_cast<int>(shape.size());
  const int n = shape[axis];
  std::size_t stride = 1;
  for (int i = axis + 1; i < ndim; ++i) stride *= shape[i];
  std::size_t outer = 1;
  for (int i = 0; i < axis; ++i) outer *= shape[i];
  const std::size_t block = stride * static_cast<std::size_t>(n);
  for (std::size_t o = 0; o < outer; ++o) {
    cplx* base = data.data() + o * block;
    for (int j = 0; j < n; ++j) {
      double fac = (j % 2 == 0) ? extra : -extra;
      cplx* line = base + static_cast<std::size_t>(j) * stride;
      for (std::size_t inner = 0; inner < stride; ++inner) line[inner] *= fac;
    }
  }
}

ComplexField centered_dft(const ComplexField& f, AxisKind from, AxisKind to,
                          int sign, double axis_scale) {
  ComplexField out = f;
  auto sh = f.shape();
  for (std::size_t a = 0; a < f.axes.size(); ++a) {
    if (f.axes[a] != from) continue;
    const int ax = static_cast<int>(a);
    const int n = sh[a];
    const double parity = (n / 2) % 2 == 0 ? 1.0 : -1.0;
    modulate_axis(out.data, sh, ax, 1.0);
    detail::fft_axis(out.data, sh, ax, sign);
    modulate_axis(out.data, sh, ax, axis_scale * parity);
    out.axes[a] = to;
  }
  return out;
}

} // namespace

ComplexField dft_s_to_P(const ComplexField& f) {
  for (auto a : f.axes)
    if (a == AxisKind::P)
      throw std::invalid_argument("dft_s_to_P: input already has P-tagged axes");
  const double c =
      f.grid->ds() / std::sqrt(2.0 * std::numbers::pi * f.grid->hbar());
  return centered_dft(f, AxisKind::S, AxisKind::P, -1, c);
}

ComplexField idft_P_to_s(const ComplexField& F) {
  for (auto a : F.axes)
    if (a == AxisKind::S)
      throw std::invalid_argument("idft_P_to_s: input already has s-tagged axes");
  const double c =
      F.grid->dP() / std::sqrt(2.0 * std::numbers::pi * F.grid->hbar());
  return centered_dft(F, AxisKind::P, AxisKind::S, +1, c);
}

ComplexField spectral_gradient(const ComplexField& f, int axis) {
  ComplexField out = f;
  auto sh = f.shape();
  const int n = sh[axis];
  double dx = 0;
  switch (f.axes[axis]) {
    case AxisKind::R: dx = f.grid->dr(); break;
    case AxisKind::S: dx = f.grid->ds(); break;
    case AxisKind::P: dx = f.grid->dP(); break;
  }
  detail::fft_axis(out.data, sh, axis, -1);

  const int ndim = static_cast<int>(sh.size());
  std::size_t stride = 1;
  for (int i = axis + 1; i < ndim; ++i) stride *= sh[i];
  std::size_t outer = 1;
  for (int i = 0; i < axis; ++i) outer *= sh[i];
  const std::size_t block = stride * static_cast<std::size_t>(n);
  for (std::size_t o = 0; o < outer; ++o) {
    cplx* base = out.data.data() + o * block;
    for (int m = 0; m < n; ++m) {
      const cplx ik{0.0, PhaseGrid::wavenumber(m, n, dx) / n};
      cplx* line = base + static_cast<std::size_t>(m) * stride;
      for (std::size_t inner = 0; inner < stride; ++inner) line[inner] *= ik;
    }
  }
  detail::fft_axis(out.data, sh, axis, +1);
  return out;
}

double boundary_mass(const ComplexField& f) {
  auto sh = f.shape();
  const int ndim = static_cast<int>(sh.size());
  double total = 0.0, edge = 0.0;
  std::vector<int> idx(ndim, 0);
  for (std::size_t flat = 0; flat < f.data.size(); ++flat) {
    double m = std::norm(f.data[flat]);
    total += m;
    for (int i = 0; i < ndim; ++i)
      if (idx[i] == 0 || idx[i] == sh[i] - 1) {
        edge += m;
        break;
      }
    for (int i = ndim - 1; i >= 0; --i) {
      if (++idx[i] < sh[i]) break;
      idx[i] = 0;
    }
  }
  return total > 0 ? edge / total : 0.0;
}

} // namespace giwe
