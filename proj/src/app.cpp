#include "giwe/app.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace giwe::app {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// ---- small utilities -----------------------------------------------------

void check_finite(double v, const std::string& where) {
  if (!std::isfinite(v))
    throw ConfigError("config: non-finite value in " + where);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : keys)
      if (item.key() == k) ok = true;
    if (!ok)
      throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
  }
}

double get_num(const json& obj, const char* key, double def,
               const std::string& where) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number())
    throw ConfigError("config: " + where + "." + key + " must be a number");
  const double v = obj[key].get<double>();
  check_finite(v, where + "." + std::string(key));
  return v;
}

int get_int(const json& obj, const char* key, int def,
            const std::string& where) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number_integer())
    throw ConfigError("config: " + where + "." + key + " must be an integer");
  return obj[key].get<int>();
}

Vec get_vec(const json& obj, const char* key, const std::string& where) {
  Vec v{0, 0};
  if (!obj.contains(key)) return v;
  const json& a = obj[key];
  if (!a.is_array() || a.empty() || a.size() > 2)
    throw ConfigError("config: " + where + "." + key +
                      " must be an array of 1 or 2 numbers");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number())
      throw ConfigError("config: " + where + "." + key + " must be numeric");
    v[i] = a[i].get<double>();
    check_finite(v[i], where + "." + std::string(key));
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

InitialComponent parse_component(const json& c, const std::string& where) {
  reject_unknown(c, {"r0", "p0", "sigma", "weight"}, where);
  InitialComponent out;
  out.r0 = get_vec(c, "r0", where);
  out.p0 = get_vec(c, "p0", where);
  out.sigma = get_num(c, "sigma", 1.0, where);
  if (out.sigma <= 0) throw ConfigError("config: sigma must be > 0");
  if (c.contains("weight")) {
    const json& w = c["weight"];
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() ||
        !w[1].is_number())
      throw ConfigError("config: weight must be [re, im]");
    out.weight = cplx(w[0].get<double>(), w[1].get<double>());
  }
  return out;
}

// ---- scenario / state assembly ------------------------------------------

EMConfiguration make_em(const ScenarioConfig& sc) {
  EMConfiguration em;
  if (sc.scenario == "harmonic_well") {
    em = scenarios::harmonic_well(sc.grid.dim,
                                  sc.params.empty() ? 1.0 : sc.params[0],
                                  sc.m, sc.q);
  } else {
    em = scenarios::by_name(sc.scenario, sc.params, sc.grid.dim);
    em.q = sc.q;
    em.m = sc.m;
  }
  return em;
}

Wavefunction initial_psi(const PhaseGrid& grid, const ScenarioConfig& sc) {
  Wavefunction psi = make_gaussian(grid, sc.initial[0].r0, sc.initial[0].p0,
                                   sc.initial[0].sigma);
  for (cplx& v : psi.data) v *= sc.initial[0].weight;
  for (std::size_t i = 1; i < sc.initial.size(); ++i) {
    const Wavefunction part = make_gaussian(grid, sc.initial[i].r0,
                                            sc.initial[i].p0,
                                            sc.initial[i].sigma);
    for (std::size_t j = 0; j < psi.data.size(); ++j)
      psi.data[j] += sc.initial[i].weight * part.data[j];
  }
  const double n = psi.norm();
  if (n <= 0) throw ConfigError("config: initial state has zero norm");
  for (cplx& v : psi.data) v /= std::sqrt(n);
  return psi;
}

GaugeFunction chi_for(const ScenarioConfig& sc) {
  // symmetric -> Landau map when the scenario is the symmetric uniform-B
  // gauge; otherwise a generic low-order polynomial gauge function
  if (sc.scenario == "uniform_B_symmetric") {
    const double B = sc.params.empty() ? 1.0 : sc.params[0];
    GaugeFunction g = GaugeFunction::zero();
    g.chi = [B](const Vec& r, double) { return -0.5 * B * r[0] * r[1]; };
    g.grad_chi = [B](const Vec& r, double) {
      return Vec{-0.5 * B * r[1], -0.5 * B * r[0]};
    };
    g.hess_chi = [B](const Vec&, double) {
      return Mat{{{0, -0.5 * B}, {-0.5 * B, 0}}};
    };
    return g;
  }
  const int d = sc.grid.dim;
  GaugeFunction g = GaugeFunction::zero();
  g.chi = [d](const Vec& r, double) {
    return 0.1 * r[0] + (d > 1 ? 0.05 * r[0] * r[1] : 0.0);
  };
  g.grad_chi = [d](const Vec& r, double) {
    return Vec{0.1 + (d > 1 ? 0.05 * r[1] : 0.0),
               d > 1 ? 0.05 * r[0] : 0.0};
  };
  g.hess_chi = [d](const Vec&, double) {
    return d > 1 ? Mat{{{0, 0.05}, {0.05, 0}}} : Mat{{{0, 0}, {0, 0}}};
  };
  return g;
}

// analytic phase-space Gaussian matching make_gaussian
cplx wigner_gaussian(const Vec& P, const Vec& r, const InitialComponent& ic,
                     int d, double hbar) {
  double ex = 0.0;
  for (int a = 0; a < d; ++a) {
    const double dr = r[a] - ic.r0[a];
    const double dp = P[a] - ic.p0[a];
    ex += dr * dr / (ic.sigma * ic.sigma) +
          ic.sigma * ic.sigma * dp * dp / (hbar * hbar);
  }
  return std::pow(std::numbers::pi * hbar, -d) * std::exp(-ex);
}

// ---- artifacts -----------------------------------------------------------

Artifact write_complex_bin(const fs::path& dir, const std::string& name,
                           const ComplexField& f, double time,
                           const std::string& kind) {
  std::string bytes(reinterpret_cast<const char*>(f.data.data()),
                    f.data.size() * sizeof(cplx));
  write_file(dir / (name + ".bin"), bytes);

  const PhaseGrid& g = *f.grid;
  json side;
  side["shape"] = f.shape();
  std::vector<std::string> ax;
  for (AxisKind k : f.axes)
    ax.push_back(k == AxisKind::P ? "P" : (k == AxisKind::S ? "S" : "R"));
  side["axes"] = ax;
  side["layout"] = "row-major";
  side["dtype"] = "complex128";
  side["endianness"] = "little";
  side["time"] = time;
  side["kind"] = kind;
  side["grid"] = {{"dim", g.dim()},   {"n_r", g.n_r()}, {"n_s", g.n_s()},
                  {"L_r", g.L_r()},   {"L_s", g.L_s()}, {"hbar", g.hbar()},
                  {"dr", g.dr()},     {"dP", g.dP()},   {"P0", g.P(0)},
                  {"r0", g.r(0)}};
  side["convention"] = {
      {"transform", "exp(-i s.P/hbar), unitary (2 pi hbar)^(-1/2) per axis"},
      {"P_axis", "P_k = (k - n_s/2) * dP, dP = 2 pi hbar/(n_s ds)"}};
  write_file(dir / (name + ".json"), side.dump(2));

  Artifact a;
  a.name = name + ".bin";
  a.shape = f.shape();
  a.checksum = hex64(fnv1a(bytes.data(), bytes.size()));
  return a;
}

Artifact text_artifact(const fs::path& dir, const std::string& name,
                       const std::string& text) {
  write_file(dir / name, text);
  Artifact a;
  a.name = name;
  a.checksum = hex64(fnv1a(text.data(), text.size()));
  return a;
}

json manifest_json(const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["wall_seconds"] = m.wall_seconds;
  j["artifacts"] = json::array();
  for (const Artifact& a : m.artifacts)
    j["artifacts"].push_back(
        {{"name", a.name}, {"shape", a.shape}, {"checksum", a.checksum}});
  j["checks"] = json::array();
  for (const CheckResult& c : m.checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"tolerance", c.tolerance},
                           {"bound", c.lower_bound ? "lower" : "upper"},
                           {"pass", c.pass}});
  return j;
}

fs::path resolve_out_dir(const std::string& dir) {
  fs::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("GIWE_OUTPUT_ROOT")) p = fs::path(root) / p;
  }
  return p;
}

CheckResult upper(const std::string& name, double value, double tol) {
  return {name, value, tol, false, value <= tol};
}
CheckResult lower(const std::string& name, double value, double tol) {
  return {name, value, tol, true, value >= tol};
}

double rel_l2(const ComplexField& a, const ComplexField& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    num += std::norm(a.data[i] - b.data[i]);
    den += std::norm(b.data[i]);
  }
  return std::sqrt(num) / (std::sqrt(den) + 1e-300);
}

double sup_dev(const ComplexField& a, const ComplexField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

double sup_abs(const ComplexField& a) {
  double m = 0;
  for (const cplx& v : a.data) m = std::max(m, std::abs(v));
  return m;
}

// bivariate polynomial with exact derivatives, for operator-identity checks
struct Poly2 {
  struct Term {
    int a, b;
    double c;
  };
  std::vector<Term> terms;
  double eval(const Vec& r) const {
    double s = 0;
    for (const Term& t : terms)
      s += t.c * std::pow(r[0], t.a) * std::pow(r[1], t.b);
    return s;
  }
  double deriv(const std::array<int, 2>& al, const Vec& r) const {
    double s = 0;
    for (const Term& t : terms) {
      if (al[0] > t.a || al[1] > t.b) continue;
      double c = t.c;
      for (int k = 0; k < al[0]; ++k) c *= t.a - k;
      for (int k = 0; k < al[1]; ++k) c *= t.b - k;
      s += c * std::pow(r[0], t.a - al[0]) * std::pow(r[1], t.b - al[1]);
    }
    return s;
  }
};

PhaseSpaceFunction gaussian_fs(const PhaseGrid& grid,
                               const EMConfiguration& em,
                               const GaussLegendre& quad, const Vec& r0,
                               const Vec& p0, double sigma) {
  const Wavefunction psi = make_gaussian(grid, r0, p0, sigma);
  const WsContext ctx = make_ws_context(grid, em, quad);
  return ws(psi_to_rho(psi), ctx);
}

// ---- verify suites -------------------------------------------------------

std::vector<CheckResult> suite_transforms() {
  std::vector<CheckResult> out;
  {
    // analytic phase-space Gaussian, d=1
    PhaseGrid g = make_grid({1, 64, 64, 8.0, 8.0, 1.0});
    const Wavefunction psi = make_gaussian(g, {0, 0}, {0, 0}, 1.0);
    const PhaseSpaceFunction fw = weyl(psi_to_rho(psi));
    double dev = 0;
    for (int k = 0; k < g.n_s(); ++k)
      for (int j = 0; j < g.n_r(); ++j) {
        const double x = g.r(j), p = g.P(k);
        const double ref =
            std::exp(-x * x - p * p) / std::numbers::pi;
        dev = std::max(dev,
                       std::abs(fw.field.data[k * g.n_r() + j] - ref));
      }
    out.push_back(upper("wigner_gaussian_analytic", dev, 1e-8));
  }
  {
    PhaseGrid g = make_grid({2, 16, 16, 8.0, 8.0, 1.0});
    const EMConfiguration em = scenarios::uniform_B_symmetric(1.0);
    const GaussLegendre quad(16);
    const Wavefunction psi = make_gaussian(g, {0.5, -0.3}, {0.4, 0.2}, 1.2);
    const DensityMatrix rho = psi_to_rho(psi);
    out.push_back(upper("hermiticity", hermiticity_error(rho), 1e-10));

    const PhaseSpaceFunction fw = weyl(rho);
    const DensityMatrix back = inv_weyl(fw);
    out.push_back(upper("weyl_roundtrip", sup_dev(back.field, rho.field),
                        1e-12));

    const WsContext ctx = make_ws_context(g, em, quad);
    const PhaseSpaceFunction Fs = ws(rho, ctx);
    const DensityMatrix back2 = inv_ws(Fs, ctx);
    out.push_back(
        upper("ws_roundtrip", sup_dev(back2.field, rho.field), 1e-12));

    const PhaseSpaceFunction Ft = t_transform(fw, ctx);
    out.push_back(upper("t_transform_composition",
                        sup_dev(Ft.field, Fs.field), 1e-10));
  }
  return out;
}

std::vector<CheckResult> suite_lemmas() {
  std::vector<CheckResult> out;
  const Poly2 poly{{{0, 0, 0.7},
                    {1, 0, 0.4},
                    {0, 1, -0.3},
                    {2, 0, 0.25},
                    {1, 1, -0.15},
                    {0, 2, 0.1},
                    {3, 0, 0.05},
                    {1, 2, 0.02}}};
  const GaussLegendre quad(16);
  for (int d : {1, 2}) {
    PhaseGrid g = make_grid({d, d == 1 ? 32 : 16, d == 1 ? 32 : 16, 6.0,
                             6.0, 1.0});
    const EMConfiguration em = scenarios::free_particle(d);
    const PhaseSpaceFunction Fs =
        gaussian_fs(g, em, quad, {0.2, -0.1}, {0.3, 0.2}, 1.0);
    for (auto kind : {SincOperatorSpec::Kind::sinc,
                      SincOperatorSpec::Kind::sinc_prime}) {
      SincOperatorSpec sp;
      sp.kind = kind;
      sp.n_series = 3;
      sp.g = [&poly](const Vec& r) { return poly.eval(r); };
      sp.g_deriv = [&poly](const std::array<int, 2>& al, const Vec& r) {
        return poly.deriv(al, r);
      };
      const PhaseSpaceFunction a = apply_sinc_operator(sp, Fs, quad);
      const PhaseSpaceFunction b = apply_sinc_series(sp, Fs);
      const double ref = sup_abs(a.field);
      const std::string name =
          std::string(kind == SincOperatorSpec::Kind::sinc ? "sinc"
                                                           : "sinc_prime") +
          "_quadrature_vs_series_d" + std::to_string(d);
      out.push_back(upper(name, sup_dev(a.field, b.field) / (ref > 0 ? ref : 1),
                          1e-9));
    }
  }
  return out;
}

std::vector<CheckResult> suite_kernels() {
  std::vector<CheckResult> out;
  const GaussLegendre quad(16);
  PhaseGrid g = make_grid({2, 8, 8, 6.0, 6.0, 1.0});
  EMConfiguration em = scenarios::linear_B(1.0, 0.2);
  // add an electric component so every kernel is exercised
  em.phi = [](const Vec& r, double) { return -0.5 * r[0] - 0.3 * r[1]; };
  em.grad_phi = [](const Vec&, double) { return Vec{-0.5, -0.3}; };
  const KernelSet K = build_kernels(em, g, quad);
  const PhaseSpaceFunction Fs =
      gaussian_fs(g, em, quad, {0.3, 0.1}, {0.2, -0.2}, 1.3);

  {
    const ComplexField a = convolve_P(K.ell0, Fs.field);
    const ComplexField b = convolve_P_direct(K.ell0, Fs.field);
    out.push_back(upper("convolution_theorem_ell0", rel_l2(a, b), 1e-10));
  }
  {
    // full weak application vs direct convolution sums
    const int d = g.dim();
    const double scale =
        std::pow(2.0 * std::numbers::pi * g.hbar(), -0.5 * d);
    ComplexField direct = convolve_P_direct(K.ell0, Fs.field);
    {
      const ComplexField t = convolve_P_direct(K.mw2, Fs.field);
      for (std::size_t i = 0; i < direct.size(); ++i)
        direct.data[i] += t.data[i];
    }
    for (int j = 0; j < 2; ++j) {
      const ComplexField t = convolve_P_direct(K.ell1[j], Fs.field);
      const auto shape = direct.shape();
      std::size_t stride = 1;
      for (std::size_t a = j + 1; a < shape.size(); ++a) stride *= shape[a];
      for (std::size_t i = 0; i < direct.size(); ++i) {
        const int k = static_cast<int>(i / stride % shape[j]);
        direct.data[i] += g.P(k) * t.data[i];
      }
    }
    for (int i = 0; i < 2; ++i) {
      const ComplexField gr = spectral_gradient(Fs.field, d + i);
      const ComplexField t = convolve_P_direct(K.mw1[i], gr);
      for (std::size_t a = 0; a < direct.size(); ++a)
        direct.data[a] += t.data[a];
    }
    for (cplx& v : direct.data) v *= scale;
    const PhaseSpaceFunction fast = apply_weak_rhs(Fs, K);
    out.push_back(
        upper("weak_rhs_vs_direct_convolution", rel_l2(fast.field, direct),
              1e-10));
  }
  {
    // momentum integral of the weak right-hand side vanishes pointwise in r
    const PhaseSpaceFunction rhs = apply_weak_rhs(Fs, K);
    const std::size_t R = static_cast<std::size_t>(g.n_r()) * g.n_r();
    const double meas = g.dP() * g.dP();
    double worst = 0;
    for (std::size_t rb = 0; rb < R; ++rb) {
      cplx acc(0, 0);
      for (std::size_t pk = 0; pk < rhs.field.size() / R; ++pk)
        acc += rhs.field.data[pk * R + rb];
      worst = std::max(worst, std::abs(acc) * meas);
    }
    out.push_back(upper("momentum_annihilation", worst, 1e-9));
  }
  return out;
}

std::vector<CheckResult> suite_equivalence() {
  std::vector<CheckResult> out;
  const GaussLegendre quad(16);
  PhaseGrid g = make_grid({2, 16, 16, 8.0, 8.0, 1.0});
  const EMConfiguration em = scenarios::linear_B(1.0, 0.15);
  const KernelSet K = build_kernels(em, g, quad);
  const PhaseSpaceFunction Fs =
      gaussian_fs(g, em, quad, {0.4, -0.2}, {0.3, 0.5}, 1.1);
  const PhaseSpaceFunction weak = weak_generator(Fs, K);
  const PhaseSpaceFunction sq =
      strong_rhs(Fs, em, quad, SincRoute::quadrature, 3);
  const PhaseSpaceFunction ss = strong_rhs(Fs, em, quad, SincRoute::series, 3);
  out.push_back(upper("strong_quadrature_vs_weak",
                      rel_l2(sq.field, weak.field), 1e-6));
  out.push_back(
      upper("strong_series_vs_weak", rel_l2(ss.field, weak.field), 1e-6));
  return out;
}

std::vector<CheckResult> suite_conservation() {
  std::vector<CheckResult> out;
  const GaussLegendre quad(16);
  {
    PhaseGrid g = make_grid({1, 64, 64, 8.0, 8.0, 1.0});
    const EMConfiguration em = scenarios::uniform_E(1, {0.5, 0.0});
    const KernelSet K = build_kernels(em, g, quad);
    const PhaseSpaceFunction F0 =
        gaussian_fs(g, em, quad, {0, 0}, {0, 0}, 1.0);
    EvolutionConfig evo;
    evo.dt = 0.005;
    evo.t_final = 0.5;
    evo.stride = 10;
    const Trajectory tr = evolve_weak_giwe(F0, K, evo);
    double drift = 0;
    for (double n : tr.norms) drift = std::max(drift, std::abs(n - tr.norms[0]));
    out.push_back(upper("norm_drift", drift, 1e-8));
    const std::vector<double> res = continuity_residual(tr, em.m);
    out.push_back(upper("continuity_residual",
                        *std::max_element(res.begin(), res.end()), 1e-3));
  }
  return out;
}

std::vector<CheckResult> suite_gauge() {
  std::vector<CheckResult> out;
  const GaussLegendre quad(16);
  PhaseGrid g = make_grid({2, 32, 32, 8.0, 8.0, 1.0});
  const double B = 1.0;
  const EMConfiguration em = scenarios::uniform_B_symmetric(B);
  GaugeFunction chi = GaugeFunction::zero();
  chi.chi = [B](const Vec& r, double) { return -0.5 * B * r[0] * r[1]; };
  chi.grad_chi = [B](const Vec& r, double) {
    return Vec{-0.5 * B * r[1], -0.5 * B * r[0]};
  };
  chi.hess_chi = [B](const Vec&, double) {
    return Mat{{{0, -0.5 * B}, {-0.5 * B, 0}}};
  };
  const Wavefunction psi = make_gaussian(g, {0.5, 0.0}, {0.0, 0.5}, 1.0);
  const GaugeDeviation dev = gauge_deviation(psi, em, chi, quad);
  out.push_back(upper("stratonovich_gauge_invariance", dev.fs, 1e-6));
  out.push_back(lower("kinetic_shift_gauge_dependence", dev.fw, 1e-2));
  return out;
}

} // namespace

// ---- public API ----------------------------------------------------------

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  reject_unknown(j,
                 {"scenario", "grid", "initial_state", "evolution",
                  "verification", "output_dir", "quadrature_order",
                  "n_series"},
                 "top level");
  ScenarioConfig sc;

  if (j.contains("scenario")) {
    const json& s = j["scenario"];
    reject_unknown(s, {"name", "params"}, "scenario");
    if (!s.contains("name") || !s["name"].is_string())
      throw ConfigError("config: scenario.name must be a string");
    sc.scenario = s["name"].get<std::string>();
    if (s.contains("params")) {
      if (!s["params"].is_array())
        throw ConfigError("config: scenario.params must be an array");
      for (const json& v : s["params"]) {
        if (!v.is_number())
          throw ConfigError("config: scenario.params must be numeric");
        sc.params.push_back(v.get<double>());
        check_finite(sc.params.back(), "scenario.params");
      }
    }
  }

  if (j.contains("grid")) {
    const json& gj = j["grid"];
    reject_unknown(gj, {"dim", "n_r", "n_s", "L_r", "L_s", "hbar", "q", "m"},
                   "grid");
    sc.grid.dim = get_int(gj, "dim", 1, "grid");
    sc.grid.n_r = get_int(gj, "n_r", 64, "grid");
    sc.grid.n_s = get_int(gj, "n_s", 64, "grid");
    sc.grid.L_r = get_num(gj, "L_r", 8.0, "grid");
    sc.grid.L_s = get_num(gj, "L_s", 8.0, "grid");
    sc.grid.hbar = get_num(gj, "hbar", 1.0, "grid");
    sc.q = get_num(gj, "q", 1.0, "grid");
    sc.m = get_num(gj, "m", 1.0, "grid");
    if (sc.m <= 0) throw ConfigError("config: grid.m must be > 0");
  }

  if (j.contains("initial_state")) {
    const json& is = j["initial_state"];
    reject_unknown(is, {"type", "r0", "p0", "sigma", "weight", "components"},
                   "initial_state");
    const std::string type =
        is.contains("type") ? is["type"].get<std::string>() : "gaussian";
    sc.initial.clear();
    if (type == "gaussian") {
      json c = is;
      c.erase("type");
      sc.initial.push_back(parse_component(c, "initial_state"));
    } else if (type == "superposition") {
      if (!is.contains("components") || !is["components"].is_array() ||
          is["components"].empty())
        throw ConfigError("config: superposition needs components");
      for (const json& c : is["components"])
        sc.initial.push_back(parse_component(c, "initial_state.components"));
    } else {
      throw ConfigError("config: unknown initial_state.type '" + type + "'");
    }
  }

  if (j.contains("evolution")) {
    const json& e = j["evolution"];
    reject_unknown(e, {"engine", "scheme", "dt", "t_final", "stride"},
                   "evolution");
    if (e.contains("scheme") &&
        e["scheme"].get<std::string>() != "strang_rk4")
      throw ConfigError("config: evolution.scheme must be strang_rk4");
    const std::string eng =
        e.contains("engine") ? e["engine"].get<std::string>() : "weak_giwe";
    if (eng == "weak_giwe")
      sc.evo.engine = Engine::weak_giwe;
    else if (eng == "schrodinger")
      sc.evo.engine = Engine::schrodinger;
    else if (eng == "liouville")
      sc.evo.engine = Engine::liouville;
    else
      throw ConfigError("config: unknown engine '" + eng + "'");
    sc.evo.dt = get_num(e, "dt", 1e-2, "evolution");
    sc.evo.t_final = get_num(e, "t_final", 1.0, "evolution");
    sc.evo.stride = get_int(e, "stride", 1, "evolution");
    if (sc.evo.dt <= 0 || sc.evo.t_final <= 0 || sc.evo.stride < 1)
      throw ConfigError("config: evolution parameters must be positive");
  }

  if (j.contains("verification")) {
    if (!j["verification"].is_array())
      throw ConfigError("config: verification must be an array of names");
    for (const json& v : j["verification"]) {
      if (!v.is_string())
        throw ConfigError("config: verification entries must be strings");
      sc.checks.push_back(v.get<std::string>());
    }
  }

  if (j.contains("output_dir"))
    sc.output_dir = j["output_dir"].get<std::string>();
  sc.quad_order = get_int(j, "quadrature_order", 16, "top level");
  sc.n_series = get_int(j, "n_series", 3, "top level");
  if (sc.quad_order < 1 || sc.n_series < 0)
    throw ConfigError("config: quadrature_order/n_series out of range");
  return sc;
}

std::string serialize_config(const ScenarioConfig& sc) {
  json j;
  j["scenario"] = {{"name", sc.scenario}, {"params", sc.params}};
  j["grid"] = {{"dim", sc.grid.dim},   {"n_r", sc.grid.n_r},
               {"n_s", sc.grid.n_s},   {"L_r", sc.grid.L_r},
               {"L_s", sc.grid.L_s},   {"hbar", sc.grid.hbar},
               {"q", sc.q},            {"m", sc.m}};
  json comps = json::array();
  for (const InitialComponent& c : sc.initial)
    comps.push_back({{"r0", {c.r0[0], c.r0[1]}},
                     {"p0", {c.p0[0], c.p0[1]}},
                     {"sigma", c.sigma},
                     {"weight", {c.weight.real(), c.weight.imag()}}});
  j["initial_state"] = {{"type", "superposition"}, {"components", comps}};
  const char* eng = sc.evo.engine == Engine::weak_giwe ? "weak_giwe"
                    : sc.evo.engine == Engine::schrodinger ? "schrodinger"
                                                           : "liouville";
  j["evolution"] = {{"engine", eng},
                    {"scheme", "strang_rk4"},
                    {"dt", sc.evo.dt},
                    {"t_final", sc.evo.t_final},
                    {"stride", sc.evo.stride}};
  j["verification"] = sc.checks;
  j["output_dir"] = sc.output_dir;
  j["quadrature_order"] = sc.quad_order;
  j["n_series"] = sc.n_series;
  return j.dump(2);
}

int cmd_run(const std::string& config_path) {
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  }
  ScenarioConfig sc;
  try {
    sc = parse_config_text(text);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  const auto t_start = std::chrono::steady_clock::now();
  try {
    const PhaseGrid grid = make_grid(sc.grid);
    const EMConfiguration em = make_em(sc);
    const GaussLegendre quad(sc.quad_order);
    const Wavefunction psi = initial_psi(grid, sc);
    const WsContext ctx = make_ws_context(grid, em, quad);
    const PhaseSpaceFunction Fs0 = ws(psi_to_rho(psi), ctx);

    Trajectory tr;
    if (sc.evo.engine == Engine::weak_giwe) {
      const KernelSet K = build_kernels(em, grid, quad);
      tr = evolve_weak_giwe(Fs0, K, sc.evo);
    } else if (sc.evo.engine == Engine::schrodinger) {
      tr = evolve_schrodinger(psi, em, sc.evo);
      for (const Wavefunction& p : tr.psis) {
        PhaseSpaceFunction F = ws(psi_to_rho(p), ctx);
        F.time = p.time;
        tr.snapshots.push_back(std::move(F));
      }
    } else {
      std::function<cplx(const Vec&, const Vec&)> closure;
      if (sc.initial.size() == 1) {
        const InitialComponent ic = sc.initial[0];
        const int d = grid.dim();
        const double hbar = grid.hbar();
        closure = [ic, d, hbar](const Vec& P, const Vec& r) {
          return wigner_gaussian(P, r, ic, d, hbar);
        };
      }
      tr = evolve_liouville(Fs0, em, sc.evo, closure);
    }

    // artifacts
    const fs::path dir = resolve_out_dir(sc.output_dir);
    fs::create_directories(dir);
    RunManifest man;
    man.version = "1.0.0";
    const std::string canon = serialize_config(sc);
    man.config_hash = hex64(fnv1a(canon.data(), canon.size()));
    man.artifacts.push_back(text_artifact(dir, "config.json", canon));

    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%03zu", k);
      man.artifacts.push_back(write_complex_bin(
          dir, name, tr.snapshots[k].field, tr.times[k], "stratonovich"));
    }

    json diag = json::array();
    std::vector<DiagnosticsReport> reports;
    if (!tr.snapshots.empty()) reports = diagnose(tr, em.m);
    for (const DiagnosticsReport& r : reports) {
      json e;
      e["time"] = r.time;
      e["norm"] = r.norm;
      e["boundary_mass"] = r.boundary_mass;
      e["continuity_l2"] = r.continuity_l2;
      e["density"] = r.density;
      e["current_x"] = r.current[0];
      e["current_y"] = r.current[1];
      diag.push_back(e);
    }
    man.artifacts.push_back(
        text_artifact(dir, "diagnostics.json", diag.dump()));

    // requested verification checks
    for (const std::string& name : sc.checks) {
      if (name == "norm_conservation") {
        double drift = 0;
        for (double n : tr.norms)
          drift = std::max(drift, std::abs(n - tr.norms[0]));
        man.checks.push_back(upper("norm_conservation", drift, 1e-8));
      } else if (name == "continuity") {
        double worst = 0;
        if (tr.snapshots.size() >= 3)
          for (double v : continuity_residual(tr, em.m))
            worst = std::max(worst, v);
        man.checks.push_back(upper("continuity", worst, 1e-3));
      } else if (name == "gauge_invariance") {
        const GaugeDeviation dev =
            gauge_deviation(psi, em, chi_for(sc), quad);
        man.checks.push_back(upper("gauge_invariance", dev.fs, 1e-6));
      } else {
        throw ConfigError("config: unknown verification check '" + name +
                          "'");
      }
    }

    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    write_file(dir / "manifest.json", manifest_json(man).dump(2));

    bool all_pass = true;
    for (const CheckResult& c : man.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value="
                << c.value << (c.lower_bound ? " >= " : " <= ")
                << c.tolerance << "\n";
      all_pass = all_pass && c.pass;
    }
    std::cout << "run complete: " << tr.snapshots.size()
              << " snapshots in " << dir.string() << "\n";
    return all_pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}

int cmd_verify(const std::string& suite) {
  std::vector<CheckResult> checks;
  try {
    if (suite == "transforms")
      checks = suite_transforms();
    else if (suite == "lemmas")
      checks = suite_lemmas();
    else if (suite == "kernels")
      checks = suite_kernels();
    else if (suite == "equivalence")
      checks = suite_equivalence();
    else if (suite == "conservation")
      checks = suite_conservation();
    else if (suite == "gauge")
      checks = suite_gauge();
    else {
      std::cerr << "unknown suite '" << suite << "'\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }

  RunManifest man;
  man.version = "1.0.0";
  man.config_hash = hex64(fnv1a(suite.data(), suite.size()));
  man.checks = checks;
  bool all_pass = true;
  for (const CheckResult& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value="
              << c.value << (c.lower_bound ? " >= " : " <= ") << c.tolerance
              << "\n";
    all_pass = all_pass && c.pass;
  }
  try {
    const fs::path dir = resolve_out_dir("verify_" + suite);
    fs::create_directories(dir);
    write_file(dir / "manifest.json", manifest_json(man).dump(2));
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 4;
  }
  return all_pass ? 0 : 1;
}

int cmd_export(const std::string& run_dir, const std::string& what) {
  const fs::path dir(run_dir);
  if (!fs::exists(dir / "manifest.json")) {
    std::cerr << "no manifest in " << run_dir << "\n";
    return 2;
  }
  try {
    if (what == "series") {
      const json diag = json::parse(read_file((dir / "diagnostics.json").string()));
      std::ostringstream csv;
      csv << "t,boundary_mass,norm,continuity_l2\n";
      for (const json& e : diag)
        csv << e["time"].get<double>() << ","
            << e["boundary_mass"].get<double>() << ","
            << e["norm"].get<double>() << ","
            << e["continuity_l2"].get<double>() << "\n";
      write_file(dir / "series.csv", csv.str());
    } else if (what == "density") {
      const json diag = json::parse(read_file((dir / "diagnostics.json").string()));
      std::ostringstream csv;
      csv << "t,index,density,current_x,current_y\n";
      for (const json& e : diag) {
        const auto& den = e["density"];
        for (std::size_t i = 0; i < den.size(); ++i)
          csv << e["time"].get<double>() << "," << i << ","
              << den[i].get<double>() << ","
              << e["current_x"][i].get<double>() << ","
              << e["current_y"][i].get<double>() << "\n";
      }
      write_file(dir / "density.csv", csv.str());
    } else if (what == "slice") {
      // central-r slice of every snapshot: columns P (per axis), Re, Im
      for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string fn = entry.path().filename().string();
        if (fn.rfind("snapshot_", 0) != 0 ||
            entry.path().extension() != ".json")
          continue;
        const json side = json::parse(read_file(entry.path().string()));
        const std::vector<int> shape =
            side["shape"].get<std::vector<int>>();
        const int dim = side["grid"]["dim"].get<int>();
        const int n_r = side["grid"]["n_r"].get<int>();
        const double P0 = side["grid"]["P0"].get<double>();
        const double dP = side["grid"]["dP"].get<double>();
        const std::string bytes = read_file(
            (dir / (entry.path().stem().string() + ".bin")).string());
        const cplx* data = reinterpret_cast<const cplx*>(bytes.data());
        std::size_t R = 1;
        for (int i = 0; i < dim; ++i) R *= n_r;
        std::size_t rb = 0; // central r index
        for (int i = 0; i < dim; ++i) rb = rb * n_r + n_r / 2;
        std::ostringstream csv;
        csv << (dim == 1 ? "P,re,im\n" : "Px,Py,re,im\n");
        const std::size_t Np = bytes.size() / sizeof(cplx) / R;
        const int n = shape[0];
        for (std::size_t pk = 0; pk < Np; ++pk) {
          const cplx v = data[pk * R + rb];
          if (dim == 1)
            csv << P0 + pk * dP;
          else
            csv << P0 + (pk / n) * dP << "," << P0 + (pk % n) * dP;
          csv << "," << v.real() << "," << v.imag() << "\n";
        }
        write_file(dir / (entry.path().stem().string() + "_slice.csv"),
                   csv.str());
      }
    } else {
      std::cerr << "unknown export '" << what << "'\n";
      return 2;
    }
  } catch (const json::exception& e) {
    std::cerr << "corrupt run data: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  }
  return 0;
}

} // namespace giwe::app
