#pragma once

#include "giwe/evolve.hpp"

namespace giwe {

// Scalar field over the r-grid, row-major, n_r^d entries.
using SpatialField = std::vector<double>;

// P(r) = sum_P F dP^d.
SpatialField density(const PhaseSpaceFunction& Fs);

// j(r) = sum_P (P/m) F dP^d; component i in slot i.
std::array<SpatialField, 2> current_from_Fs(const PhaseSpaceFunction& Fs,
                                            double m);

// j = -(i hbar / 2m)(psi* grad psi - psi grad psi*) - (q/m)|psi|^2 A,
// spectral gradients.
std::array<SpatialField, 2> current_from_psi(const Wavefunction& psi,
                                             const EMConfiguration& cfg,
                                             double t = 0.0);

// Normalized continuity defect per interior snapshot:
//   || dP/dt (centered) + div_r j ||_2 / (|| div_r j ||_2 + eps).
// Entry k corresponds to trajectory snapshot k+1 (endpoints skipped).
std::vector<double> continuity_residual(const Trajectory& traj, double m);

struct GaugeDeviation {
  double fs = 0.0; // sup-norm deviation of F_s between the two gauges
  double fw = 0.0; // same metric for the kinetic-shifted function
};

// Evaluates the same physical state in cfg and in the chi-transformed gauge
// and reports the normalized sup-norm deviations of F_s (should be tiny) and
// of F_w (generically large).
GaugeDeviation gauge_deviation(const Wavefunction& psi,
                               const EMConfiguration& cfg,
                               const GaugeFunction& chi,
                               const GaussLegendre& quad);

struct DiagnosticsReport {
  double time = 0.0;
  double norm = 0.0;
  double boundary_mass = 0.0;
  SpatialField density;
  std::array<SpatialField, 2> current;
  double continuity_l2 = 0.0; // residual at this snapshot (0 at endpoints)
};

// One report per snapshot of a phase-space trajectory.
std::vector<DiagnosticsReport> diagnose(const Trajectory& traj, double m);

} // namespace giwe
