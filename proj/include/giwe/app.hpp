#pragma once

#include "giwe/evolve.hpp"
#include "giwe/observe.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace giwe::app {

// exit-code contract: 0 pass, 1 verification fail, 2 usage/config,
// 3 numeric instability, 4 I/O failure
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InitialComponent {
  Vec r0{0, 0};
  Vec p0{0, 0};
  double sigma = 1.0;
  cplx weight{1.0, 0.0};
};

struct ScenarioConfig {
  std::string scenario = "free";
  std::vector<double> params;
  GridSpec grid;
  double q = 1.0;
  double m = 1.0;
  std::vector<InitialComponent> initial{InitialComponent{}};
  EvolutionConfig evo;
  int quad_order = 16;
  int n_series = 3;
  std::vector<std::string> checks;
  std::string output_dir = "giwe_out";
};

// Strict parse: schema-validated, unknown keys rejected, all parameters
// finite. Throws ConfigError.
ScenarioConfig parse_config_text(const std::string& json_text);
std::string serialize_config(const ScenarioConfig& cfg);

struct Artifact {
  std::string name;
  std::vector<int> shape;
  std::string checksum; // FNV-1a 64-bit, hex
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool lower_bound = false; // pass when value >= tolerance instead of <=
  bool pass = false;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<Artifact> artifacts;
  std::vector<CheckResult> checks;
};

std::uint64_t fnv1a(const void* data, std::size_t n);

int cmd_run(const std::string& config_path);
// suite in {transforms, lemmas, kernels, equivalence, conservation, gauge}
int cmd_verify(const std::string& suite);
// what in {slice, density, series}
int cmd_export(const std::string& run_dir, const std::string& what);

} // namespace giwe::app
