#pragma once

#include "giwe/fields.hpp"
#include "giwe/transforms.hpp"

#include <array>

namespace giwe {

// Weak-form evolution kernels. L_w is kept factorized as ell0 + P.ell1 (the
// Lorentz force is affine in P), with the outer P applied pointwise after
// convolution. Besides the momentum-space kernels themselves, the set keeps
// the separation-space factors u(s, r) they are transforms of; application
// multiplies those against the inverse transform of the state, which is the
// convolution theorem evaluated exactly on the periodic grid.
struct KernelSet {
  const PhaseGrid* grid = nullptr;
  double q = 1.0, m = 1.0;
  int quad_order = 16;
  bool has_electric = false;
  bool has_magnetic = false;

  // separation-space factors, axes [S..., R...]
  ComplexField u0;                  // electric part of L_w
  std::array<ComplexField, 2> u1;   // magnetic part of L_w (dotted with P)
  std::array<ComplexField, 2> um1;  // M_w1
  ComplexField um2;                 // M_w2

  // momentum-space kernels, axes [P..., R...] (the dP argument)
  ComplexField ell0;
  std::array<ComplexField, 2> ell1;
  std::array<ComplexField, 2> mw1;
  ComplexField mw2;
};

KernelSet build_kernels(const EMConfiguration& cfg, const PhaseGrid& grid,
                        const GaussLegendre& quad);

// Kernel part of the weak evolution equation at fixed r:
//   RHS = ell0 (*) F + P . (ell1 (*) F) + mw1 (*) grad_r F + mw2 (*) F
// with (*) circular convolution over the P axes.
PhaseSpaceFunction apply_weak_rhs(const PhaseSpaceFunction& Fs,
                                  const KernelSet& kernels);

// Full weak-form generator dF/dt = -(P/m).grad_r F + apply_weak_rhs(F).
PhaseSpaceFunction weak_generator(const PhaseSpaceFunction& Fs,
                                  const KernelSet& kernels);

// Direct O(N^2) circular convolution of a momentum-space kernel with a
// field, for cross-checking the transform path on small grids.
ComplexField convolve_P_direct(const ComplexField& kernel,
                               const ComplexField& field);
ComplexField convolve_P(const ComplexField& kernel, const ComplexField& field);

// g(r) sinc((hbar/2) grad_r . grad_P) target, and the sinc' variant; the
// left arrow acts on g, the right one on the target.
struct SincOperatorSpec {
  enum class Kind { sinc, sinc_prime };
  Kind kind = Kind::sinc;
  std::function<double(const Vec&)> g;
  // partial^alpha g for the series route; alpha is per-axis order.
  std::function<double(const std::array<int, 2>&, const Vec&)> g_deriv;
  int n_series = 3;
};

// Quadrature route (Lemma-4 segment averages; exact for smooth g).
PhaseSpaceFunction apply_sinc_operator(const SincOperatorSpec& spec,
                                       const PhaseSpaceFunction& target,
                                       const GaussLegendre& quad);

// Truncated differential-series route; exact when g is polynomial of degree
// <= n_series. Requires spec.g_deriv.
PhaseSpaceFunction apply_sinc_series(const SincOperatorSpec& spec,
                                     const PhaseSpaceFunction& target);

enum class SincRoute { quadrature, series };

// Strong-form generator dF/dt from the pseudo-differential evolution
// equation; N_series only matters for the series route.
PhaseSpaceFunction strong_rhs(const PhaseSpaceFunction& Fs,
                              const EMConfiguration& cfg,
                              const GaussLegendre& quad,
                              SincRoute route = SincRoute::quadrature,
                              int n_series = 3);

} // namespace giwe
