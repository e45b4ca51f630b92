#pragma once

#include "giwe/kernels.hpp"
#include "giwe/transforms.hpp"

namespace giwe {

enum class Engine { weak_giwe, schrodinger, liouville };

struct EvolutionConfig {
  double dt = 1e-2;
  double t_final = 1.0;
  int stride = 1; // snapshot every `stride` steps
  Engine engine = Engine::weak_giwe;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseSpaceFunction> snapshots;
  std::vector<Wavefunction> psis;
  std::vector<double> norms;         // logged per snapshot
  std::vector<double> boundary_mass; // logged per snapshot
};

// One Strang step of the weak-form evolution: exact spectral free-streaming
// half-steps around an RK4 sweep of the convolution part. Throws on a 10x
// sup-norm blow-up within the step.
void step_weak_giwe(PhaseSpaceFunction& Fs, const KernelSet& kernels,
                    double dt);

Trajectory evolve_weak_giwe(const PhaseSpaceFunction& F0,
                            const KernelSet& kernels,
                            const EvolutionConfig& evo);

// Crank-Nicolson integrator for the minimal-coupling Hamiltonian
//   H = (1/2m)(-i hbar grad - q A)^2 + q phi
// with spectral differentiation matrices and a dense LU solve; unitary per
// step up to roundoff. Serves as the independent reference solution.
Trajectory evolve_schrodinger(const Wavefunction& psi0,
                              const EMConfiguration& cfg,
                              const EvolutionConfig& evo);

// Runs evolve_schrodinger and emits the gauge-DEPENDENT Wigner function
// f_w(t) of each snapshot alongside the wavefunctions.
Trajectory gauge_dependent_reference(const Wavefunction& psi0,
                                     const EMConfiguration& cfg,
                                     const EvolutionConfig& evo);

// Classical transport along characteristics rdot = P/m, Pdot = qE + (q/m)PxB:
// every node is traced backward through the static flow and the initial state
// is evaluated at the foot point — through F0_eval when an analytic closure
// is supplied, otherwise by trigonometric interpolation of the F0 samples.
Trajectory evolve_liouville(
    const PhaseSpaceFunction& F0, const EMConfiguration& cfg,
    const EvolutionConfig& evo,
    std::function<cplx(const Vec& P, const Vec& r)> F0_eval = {});

// Lowest eigenstate of the same Hamiltonian by imaginary-time relaxation of
// the Crank-Nicolson scheme; renormalized every step.
Wavefunction ground_state(const PhaseGrid& grid, const EMConfiguration& cfg,
                          double tau_step = 0.05, int max_iter = 4000,
                          double tol = 1e-12);

} // namespace giwe
