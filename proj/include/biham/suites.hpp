// suites.hpp — named verification suites over the whole library, a JSON
// report format with deterministic bytes for fixed seeds, and the
// trajectory simulation runner behind the CLI.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "biham/dynamics.hpp"

namespace biham {

struct SuiteSpec {
  std::string suite_id;
  int n = 3;
  int trials = 20;
  std::uint64_t seed = 1;
  std::map<std::string, double> tol_overrides;
};

struct CheckRecord {
  std::string name;
  double tolerance = 0.0;
  double max_residual = 0.0;
  int trials = 0;
  std::uint64_t worst_seed = 0;
  std::string worst_digest;
  bool pass = false;
};

struct SuiteReport {
  std::string suite_id;
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  std::vector<CheckRecord> checks;
  double wall_seconds = 0.0;  // console-only; kept out of the JSON payload
};

// Runs one suite.  Unknown suite ids throw std::invalid_argument; check
// failures only flip `pass`, they never throw.
SuiteReport run_suite(const SuiteSpec& spec);

std::vector<std::string> suite_names();
std::string suite_description(const std::string& suite_id);
bool is_suite(const std::string& suite_id);

// Deterministic JSON payload (no timing fields).
nlohmann::ordered_json report_json(const SuiteReport& report);

// ---------------------------------------------------------------------------
// Simulation runner
// ---------------------------------------------------------------------------

struct SimulationConfig {
  int schema_version = 1;
  int n = 3;
  int flow_power = 1;
  double t_end = 10.0;
  double dt = 1e-2;
  int store_every = 1;
  int degree_cap = 4;
  std::uint64_t seed = 1;
  double scale = 0.25;
  std::string initial_kind = "random";  // random | diagonal | explicit
  std::vector<double> angles;           // diagonal/explicit initial torus
  std::vector<double> l_diag;           // diagonal initial momenta
  ComplexMatrix l_full;                 // explicit Hermitian initial value
  std::vector<std::string> observables; // extra tracked observables

  // Parses and validates; errors mention the offending line/field.
  static SimulationConfig from_json_text(const std::string& text);
  static SimulationConfig from_json_file(const std::string& path);
  nlohmann::ordered_json to_json() const;
};

struct SimulationOutcome {
  IntegrationResult trajectory;
  std::vector<DriftRecord> drifts;
  std::vector<DriftRecord> extra_drifts;  // user observables
  std::string csv_path;
  std::string report_path;
};

ReducedPoint initial_point(const SimulationConfig& config);

// Integrates, writes <out_dir>/trajectory.csv and <out_dir>/report.json.
SimulationOutcome run_simulation(const SimulationConfig& config,
                                 const std::string& out_dir);

// Worker pool size: BIHAM_THREADS when set, hardware concurrency otherwise.
int worker_count();

}  // namespace biham
