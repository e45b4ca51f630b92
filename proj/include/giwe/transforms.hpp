#pragma once

#include "giwe/fields.hpp"
#include "giwe/grid.hpp"

namespace giwe {

// psi(r) on the r-grid, row-major over the r axes.
struct Wavefunction {
  const PhaseGrid* grid = nullptr;
  std::vector<cplx> data;
  double time = 0.0;

  double norm() const; // sum |psi|^2 dr^d
};

// rho~(s, r) = rho(r + s/2, r - s/2); axes [S x d, R x d].
struct DensityMatrix {
  ComplexField field;
  double time = 0.0;

  int grid_dim() const { return field.grid->dim(); }
};

enum class PsfKind { wigner, kinetic_shifted, stratonovich };

// Phase-space function over (P x d, R x d): f_w, F_w or F_s by kind.
struct PhaseSpaceFunction {
  ComplexField field;
  PsfKind kind = PsfKind::wigner;
  double time = 0.0;

  int grid_dim() const { return field.grid->dim(); }
  double norm() const;     // sum Re(F) dP^d dr^d
  double max_imag() const; // largest |Im| (realness residue)
};

Wavefunction make_gaussian(const PhaseGrid& grid, const Vec& r0, const Vec& p0,
                           double sigma);
Wavefunction superpose(const Wavefunction& a, const Wavefunction& b, cplx ca,
                       cplx cb); // renormalized

// rho~(s,r) = psi(r+s/2) conj(psi(r-s/2)), band-limited interpolation at the
// half-grid points. Warns on stderr when boundary mass exceeds 1e-8.
DensityMatrix psi_to_rho(const Wavefunction& psi);

// Convex combination of density matrices (mixed-state helper).
DensityMatrix mix(const std::vector<DensityMatrix>& parts,
                  const std::vector<double>& weights);

double hermiticity_error(const DensityMatrix& rho);
double rho_trace(const DensityMatrix& rho); // sum_r rho~(0,r) dr^d

// Precomputed Weyl-Stratonovich phase exp(-i q s.a(r,s)/hbar) with
// a = line_avg_A; building it is the only quadrature-heavy step.
struct WsContext {
  const PhaseGrid* grid = nullptr;
  ComplexField phase; // axes [S..., R...]
};
WsContext make_ws_context(const PhaseGrid& grid, const EMConfiguration& cfg,
                          const GaussLegendre& quad);

PhaseSpaceFunction weyl(const DensityMatrix& rho);
DensityMatrix inv_weyl(const PhaseSpaceFunction& fw);

PhaseSpaceFunction ws(const DensityMatrix& rho, const WsContext& ctx);
DensityMatrix inv_ws(const PhaseSpaceFunction& Fs, const WsContext& ctx);

// T = S o W^{-1}: Wigner function -> Stratonovich function.
PhaseSpaceFunction t_transform(const PhaseSpaceFunction& fw,
                               const WsContext& ctx);

// F_w(P, r) = f_w(P + qA(r), r); gauge-DEPENDENT by construction, kept to
// contrast with F_s.
PhaseSpaceFunction kinetic_shift(const PhaseSpaceFunction& fw,
                                 const EMConfiguration& cfg);

// rho~' = exp(i q [chi(r+s/2) - chi(r-s/2)] / hbar) rho~ : how the density
// matrix changes under the gauge transform generated by chi.
DensityMatrix gauge_phase_rho(const DensityMatrix& rho, const GaugeFunction& g,
                              double q);

// psi' = exp(i q chi / hbar) psi.
Wavefunction gauge_phase_psi(const Wavefunction& psi, const GaugeFunction& g,
                             double q);

// Evaluate psi at arbitrary points by trigonometric interpolation
// (periodic). points are (x) or (x, y).
cplx eval_psi(const Wavefunction& psi, const Vec& point);

} // namespace giwe
