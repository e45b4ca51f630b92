#include "giwe/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace giwe {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
  nodes_.resize(order);
  weights_.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = weights_[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

Vec EMConfiguration::E(const Vec& r, double t) const {
  Vec gp = grad_phi ? grad_phi(r, t) : Vec{0, 0};
  Vec at = dA_dt ? dA_dt(r, t) : Vec{0, 0};
  return {-gp[0] - at[0], -gp[1] - at[1]};
}

double EMConfiguration::Bz(const Vec& r, double t) const {
  if (dim < 2 || !dA) return 0.0;
  Mat j = dA(r, t);
  return j[1][0] - j[0][1];
}

Vec EMConfiguration::lorentz(const Vec& P, const Vec& r, double t) const {
  Vec e = E(r, t);
  double b = Bz(r, t);
  // P x B with B = B_z e_z: (P_y B, -P_x B)
  return {q * e[0] + q / m * P[1] * b, q * e[1] - q / m * P[0] * b};
}

GaugeFunction GaugeFunction::zero() {
  GaugeFunction g;
  g.chi = [](const Vec&, double) { return 0.0; };
  g.grad_chi = [](const Vec&, double) { return Vec{0, 0}; };
  g.hess_chi = [](const Vec&, double) { return Mat{{{0, 0}, {0, 0}}}; };
  g.dchi_dt = [](const Vec&, double) { return 0.0; };
  return g;
}

EMConfiguration gauge_transform(const EMConfiguration& cfg,
                                const GaugeFunction& g) {
  EMConfiguration out = cfg;
  out.name = cfg.name + "+gauge";
  auto A0 = cfg.A;
  auto dA0 = cfg.dA;
  auto dAdt0 = cfg.dA_dt;
  auto phi0 = cfg.phi;
  auto gphi0 = cfg.grad_phi;
  out.A = [A0, g](const Vec& r, double t) {
    Vec a = A0 ? A0(r, t) : Vec{0, 0};
    Vec gc = g.grad_chi(r, t);
    return Vec{a[0] + gc[0], a[1] + gc[1]};
  };
  out.dA = [dA0, g](const Vec& r, double t) {
    Mat j = dA0 ? dA0(r, t) : Mat{{{0, 0}, {0, 0}}};
    Mat h = g.hess_chi(r, t);
    Mat o;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) o[i][k] = j[i][k] + h[i][k];
    return o;
  };
  out.dA_dt = [dAdt0, g](const Vec& r, double t) {
    Vec a = dAdt0 ? dAdt0(r, t) : Vec{0, 0};
    // d/dt grad(chi): catalog gauges are polynomial in r with separable
    // time factors; approximate by centered difference on grad_chi.
    const double h = 1e-6;
    Vec gp = g.grad_chi(r, t + h), gm = g.grad_chi(r, t - h);
    return Vec{a[0] + (gp[0] - gm[0]) / (2 * h), a[1] + (gp[1] - gm[1]) / (2 * h)};
  };
  out.phi = [phi0, g](const Vec& r, double t) {
    return (phi0 ? phi0(r, t) : 0.0) - g.dchi_dt(r, t);
  };
  out.grad_phi = [gphi0, g](const Vec& r, double t) {
    Vec p = gphi0 ? gphi0(r, t) : Vec{0, 0};
    const double h = 1e-6;
    // grad(dchi/dt) via centered difference of dchi_dt in space.
    Vec o = p;
    for (int i = 0; i < 2; ++i) {
      Vec rp = r, rm = r;
      rp[i] += h;
      rm[i] -= h;
      o[i] -= (g.dchi_dt(rp, t) - g.dchi_dt(rm, t)) / (2 * h);
    }
    return o;
  };
  return out;
}

double moment_avg(const std::function<double(const Vec&)>& g, const Vec& r,
                  const Vec& s, int k, const GaussLegendre& quad) {
  if (k != 0 && k != 1)
    throw std::invalid_argument("moment_avg: k must be 0 or 1");
  double acc = 0.0;
  for (int i = 0; i < quad.order(); ++i) {
    const double tau = quad.nodes()[i];
    Vec x{r[0] + 0.5 * s[0] * tau, r[1] + 0.5 * s[1] * tau};
    double w = quad.weights()[i];
    if (k == 1) w *= tau;
    acc += w * g(x);
  }
  return acc;
}

Vec line_avg_A(const EMConfiguration& cfg, const Vec& r, const Vec& s,
               const GaussLegendre& quad, double t) {
  Vec acc{0, 0};
  if (!cfg.A) return acc;
  for (int i = 0; i < quad.order(); ++i) {
    const double tau = quad.nodes()[i];
    Vec x{r[0] + 0.5 * s[0] * tau, r[1] + 0.5 * s[1] * tau};
    Vec a = cfg.A(x, t);
    acc[0] += quad.weights()[i] * a[0];
    acc[1] += quad.weights()[i] * a[1];
  }
  return {0.5 * acc[0], 0.5 * acc[1]};
}

namespace scenarios {

namespace {
EMConfiguration base(int dim, const char* name) {
  EMConfiguration c;
  c.dim = dim;
  c.name = name;
  c.A = [](const Vec&, double) { return Vec{0, 0}; };
  c.dA = [](const Vec&, double) { return Mat{{{0, 0}, {0, 0}}}; };
  c.dA_dt = [](const Vec&, double) { return Vec{0, 0}; };
  c.phi = [](const Vec&, double) { return 0.0; };
  c.grad_phi = [](const Vec&, double) { return Vec{0, 0}; };
  c.dE = [](const Vec&, double) { return Mat{{{0, 0}, {0, 0}}}; };
  c.dBz = [](const Vec&, double) { return Vec{0, 0}; };
  return c;
}
} // namespace

EMConfiguration free_particle(int dim) { return base(dim, "free"); }

EMConfiguration uniform_E(int dim, const Vec& E0) {
  EMConfiguration c = base(dim, "uniform_E");
  c.phi = [E0](const Vec& r, double) { return -E0[0] * r[0] - E0[1] * r[1]; };
  c.grad_phi = [E0](const Vec&, double) { return Vec{-E0[0], -E0[1]}; };
  return c;
}

EMConfiguration uniform_B_symmetric(double B0) {
  EMConfiguration c = base(2, "uniform_B_symmetric");
  c.A = [B0](const Vec& r, double) {
    return Vec{-0.5 * B0 * r[1], 0.5 * B0 * r[0]};
  };
  c.dA = [B0](const Vec&, double) {
    return Mat{{{0, -0.5 * B0}, {0.5 * B0, 0}}};
  };
  return c;
}

EMConfiguration uniform_B_landau(double B0) {
  EMConfiguration c = base(2, "uniform_B_landau");
  c.A = [B0](const Vec& r, double) { return Vec{-B0 * r[1], 0.0}; };
  c.dA = [B0](const Vec&, double) { return Mat{{{0, -B0}, {0, 0}}}; };
  return c;
}

EMConfiguration linear_B(double B0, double grad) {
  // A = (0, B0 x + grad x^2 / 2) so B_z = B0 + grad*x.
  EMConfiguration c = base(2, "linear_B");
  c.A = [B0, grad](const Vec& r, double) {
    return Vec{0.0, B0 * r[0] + 0.5 * grad * r[0] * r[0]};
  };
  c.dA = [B0, grad](const Vec& r, double) {
    return Mat{{{0, 0}, {B0 + grad * r[0], 0}}};
  };
  c.dBz = [grad](const Vec&, double) { return Vec{grad, 0.0}; };
  return c;
}

EMConfiguration harmonic_well(int dim, double omega, double mass,
                              double charge) {
  EMConfiguration c = base(dim, "harmonic_well");
  c.m = mass;
  c.q = charge;
  const double k = mass * omega * omega / charge; // q*phi = m w^2 r^2 / 2
  c.phi = [k, dim](const Vec& r, double) {
    double r2 = r[0] * r[0] + (dim > 1 ? r[1] * r[1] : 0.0);
    return 0.5 * k * r2;
  };
  c.grad_phi = [k, dim](const Vec& r, double) {
    return Vec{k * r[0], dim > 1 ? k * r[1] : 0.0};
  };
  c.dE = [k, dim](const Vec&, double) {
    return Mat{{{-k, 0}, {0, dim > 1 ? -k : 0.0}}};
  };
  return c;
}

EMConfiguration by_name(const std::string& name,
                        const std::vector<double>& p, int dim) {
  auto arg = [&p](std::size_t i, double def) {
    return i < p.size() ? p[i] : def;
  };
  if (name == "free") return free_particle(dim);
  if (name == "uniform_E")
    return uniform_E(dim, Vec{arg(0, 1.0), arg(1, 0.0)});
  if (name == "uniform_B_symmetric") return uniform_B_symmetric(arg(0, 1.0));
  if (name == "uniform_B_landau") return uniform_B_landau(arg(0, 1.0));
  if (name == "linear_B") return linear_B(arg(0, 1.0), arg(1, 0.1));
  if (name == "harmonic_well") return harmonic_well(dim, arg(0, 1.0));
  throw std::invalid_argument("unknown scenario: " + name);
}

} // namespace scenarios

double potential_consistency_error(const EMConfiguration& cfg, double L,
                                   int samples, double t) {
  const double h = 1e-5;
  double err = 0.0;
  auto probe = [&](const Vec& r) {
    // dA vs centered differences of A
    for (int j = 0; j < cfg.dim; ++j) {
      Vec rp = r, rm = r;
      rp[j] += h;
      rm[j] -= h;
      Vec ap = cfg.A(rp, t), am = cfg.A(rm, t);
      Mat jac = cfg.dA(r, t);
      for (int i = 0; i < 2; ++i)
        err = std::max(err,
                       std::abs((ap[i] - am[i]) / (2 * h) - jac[i][j]));
      double pp = cfg.phi(rp, t), pm = cfg.phi(rm, t);
      err = std::max(err,
                     std::abs((pp - pm) / (2 * h) - cfg.grad_phi(r, t)[j]));
    }
  };
  for (int a = 0; a < samples; ++a) {
    double x = -L + 2.0 * L * a / (samples - 1);
    if (cfg.dim == 1) {
      probe({x, 0.0});
    } else {
      for (int b = 0; b < samples; ++b) {
        double y = -L + 2.0 * L * b / (samples - 1);
        probe({x, y});
      }
    }
  }
  return err;
}

} // namespace giwe
