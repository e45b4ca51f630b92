#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace giwe {

using cplx = std::complex<double>;

struct GridSpec {
  int dim = 1;      // spatial dimension, 1 or 2
  int n_r = 64;     // points per r-axis
  int n_s = 64;     // points per s-axis (= points per P-axis)
  double L_r = 8.0; // r-domain half-width
  double L_s = 8.0; // s-domain half-width
  double hbar = 1.0;
};

// Uniform tensor grid over position r, separation s and kinetic momentum P.
// The P-axis is the exact DFT dual of the s-axis: dP = 2*pi*hbar/(n_s*ds).
class PhaseGrid {
public:
  explicit PhaseGrid(const GridSpec& spec);

  int dim() const { return spec_.dim; }
  int n_r() const { return spec_.n_r; }
  int n_s() const { return spec_.n_s; }
  double L_r() const { return spec_.L_r; }
  double L_s() const { return spec_.L_s; }
  double hbar() const { return spec_.hbar; }
  double dr() const { return dr_; }
  double ds() const { return ds_; }
  double dP() const { return dP_; }

  double r(int j) const { return -spec_.L_r + j * dr_; }
  double s(int j) const { return -spec_.L_s + j * ds_; }
  double P(int k) const { return (k - spec_.n_s / 2) * dP_; }

  // Signed wavenumber of mode m on the r-axis (zero at the Nyquist index).
  double k_r(int m) const;
  // Same for an axis with n points and spacing dx.
  static double wavenumber(int m, int n, double dx);

  const GridSpec& spec() const { return spec_; }

private:
  GridSpec spec_;
  double dr_, ds_, dP_;
};

enum class AxisKind { S, P, R };

// Dense complex field over a tensor grid; the axis tags name which axes are
// s-like, P-like or r-like. Row-major layout.
struct ComplexField {
  const PhaseGrid* grid = nullptr;
  std::vector<AxisKind> axes;
  std::vector<cplx> data;

  int axis_size(int i) const;
  std::vector<int> shape() const;
  std::size_t size() const { return data.size(); }
};

ComplexField make_field(const PhaseGrid& grid, std::vector<AxisKind> axes);

PhaseGrid make_grid(const GridSpec& spec);

// Forward transform over all s-tagged axes:
//   F(P) = (2*pi*hbar)^{-d/2} sum_s exp(-i s.P/hbar) f(s) ds^d
// with the symmetric (unitary) normalization; s axes are retagged P.
ComplexField dft_s_to_P(const ComplexField& f);

// Exact inverse of dft_s_to_P (kernel exp(+i s.P/hbar)).
ComplexField idft_P_to_s(const ComplexField& F);

// Spectral derivative along one axis (DFT, multiply by i*k, inverse DFT).
// Works on any axis kind using that axis' spacing.
ComplexField spectral_gradient(const ComplexField& f, int axis);

// Fraction of |f|^2 mass in the outermost cells of every axis, relative to
// the total; used as the periodic-truncation monitor.
double boundary_mass(const ComplexField& f);

namespace detail {
// Unnormalized FFT along one axis of a row-major array:
// sign=-1: X_k = sum_j exp(-2 pi i j k / n) x_j; sign=+1 the conjugate kernel.
void fft_axis(std::vector<cplx>& data, std::span<const int> shape, int axis,
              int sign);
} // namespace detail

} // namespace giwe
