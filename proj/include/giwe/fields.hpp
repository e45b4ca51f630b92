#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace giwe {

// d <= 2 throughout; d=1 configurations use component 0 only.
using Vec = std::array<double, 2>;
using Mat = std::array<std::array<double, 2>, 2>;

// Fixed-order Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
  explicit GaussLegendre(int order);
  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

private:
  std::vector<double> nodes_, weights_;
};

// Analytic electromagnetic configuration. Potentials and their derivatives
// are closures so kernels can evaluate them at off-grid quadrature points
// r + s*tau/2. Time-dependence is carried in the signature; the catalog
// scenarios are static.
struct EMConfiguration {
  int dim = 1;
  double q = 1.0;
  double m = 1.0;
  std::string name = "custom";

  std::function<Vec(const Vec&, double)> A;
  std::function<Mat(const Vec&, double)> dA; // dA[i][j] = dA_i/dr_j
  std::function<Vec(const Vec&, double)> dA_dt;
  std::function<double(const Vec&, double)> phi;
  std::function<Vec(const Vec&, double)> grad_phi;

  // Optional first derivatives of the derived fields; used by the
  // truncated-series route of the sinc operators (catalog fields have at
  // most linear E and B, so first derivatives suffice).
  std::function<Mat(const Vec&, double)> dE;  // dE[i][j] = dE_i/dr_j
  std::function<Vec(const Vec&, double)> dBz; // grad of B_z

  Vec E(const Vec& r, double t = 0.0) const;
  double Bz(const Vec& r, double t = 0.0) const; // scalar B_z; 0 for d=1

  // Lorentz force q E + (q/m) P x B at (P, r).
  Vec lorentz(const Vec& P, const Vec& r, double t = 0.0) const;
};

// Gauge function chi with the analytic derivatives the transforms need.
struct GaugeFunction {
  std::function<double(const Vec&, double)> chi;
  std::function<Vec(const Vec&, double)> grad_chi;
  std::function<Mat(const Vec&, double)> hess_chi;
  std::function<double(const Vec&, double)> dchi_dt;

  static GaugeFunction zero();
};

// A' = A + grad(chi), phi' = phi - dchi/dt; E and B are unchanged.
EMConfiguration gauge_transform(const EMConfiguration& cfg,
                                const GaugeFunction& g);

// tau-weighted segment average: integral_{-1}^{1} g(r + s*tau/2) tau^k dtau
// by Gauss-Legendre quadrature. k must be 0 or 1.
double moment_avg(const std::function<double(const Vec&)>& g, const Vec& r,
                  const Vec& s, int k, const GaussLegendre& quad);

// (1/2) * integral_{-1}^{1} A(r + s*tau/2) dtau, component-wise: the vector
// entering the Weyl-Stratonovich phase (before the charge factor).
Vec line_avg_A(const EMConfiguration& cfg, const Vec& r, const Vec& s,
               const GaussLegendre& quad, double t = 0.0);

// Named analytic scenarios.
namespace scenarios {
EMConfiguration free_particle(int dim);
EMConfiguration uniform_E(int dim, const Vec& E0);
EMConfiguration uniform_B_symmetric(double B0); // A = B/2 (-y, x), d=2
EMConfiguration uniform_B_landau(double B0);    // A = B (-y, 0), d=2
EMConfiguration linear_B(double B0, double grad); // B_z = B0 + grad*x, d=2
EMConfiguration harmonic_well(int dim, double omega, double mass = 1.0,
                              double charge = 1.0); // q*phi = m w^2 r^2 / 2

EMConfiguration by_name(const std::string& name,
                        const std::vector<double>& params, int dim);
} // namespace scenarios

// Finite-difference consistency check: max deviation between the analytic
// derivative closures and centered differences of (A, phi) over sample
// points in [-L, L]^dim.
double potential_consistency_error(const EMConfiguration& cfg, double L,
                                   int samples = 7, double t = 0.0);

} // namespace giwe
