// biham_cli.cpp — command-line front end.
//
//   biham verify <suite> [--n N] [--trials T] [--seed S] [--tol k=v] [--json f]
//   biham simulate --config run.json [--out dir]
//   biham list-suites
//
// Exit codes: 0 pass, 1 check/trajectory failure, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "biham/suites.hpp"

namespace {

using biham::SuiteReport;
using biham::SuiteSpec;

void print_report(const SuiteReport& rep) {
  std::printf("suite %-17s n=%d trials=%d seed=%llu  [%s]  (%.2fs)\n",
              rep.suite_id.c_str(), rep.n, rep.trials,
              static_cast<unsigned long long>(rep.seed),
              rep.pass ? "PASS" : "FAIL", rep.wall_seconds);
  for (const auto& c : rep.checks) {
    std::printf("  %-28s max_residual=%-12.3e tol=%-9.1e trials=%-4d %s\n",
                c.name.c_str(), c.max_residual, c.tolerance, c.trials,
                c.pass ? "ok" : "FAIL");
    if (!c.pass && !c.worst_digest.empty()) {
      std::printf("      worst seed=%llu digest=%s\n",
                  static_cast<unsigned long long>(c.worst_seed),
                  c.worst_digest.c_str());
    }
  }
}

int run_verify(const std::string& suite, int n, int trials, std::uint64_t seed,
               const std::vector<std::string>& tol_kv, const std::string& json_out) {
  if (!biham::is_suite(suite)) {
    std::cerr << "unknown suite: " << suite << "\nknown suites:";
    for (const auto& name : biham::suite_names()) std::cerr << ' ' << name;
    std::cerr << '\n';
    return 2;
  }
  SuiteSpec spec;
  spec.suite_id = suite;
  spec.trials = trials;
  spec.seed = seed;
  for (const auto& kv : tol_kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "bad --tol override (want key=value): " << kv << '\n';
      return 2;
    }
    try {
      spec.tol_overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "bad --tol value: " << kv << '\n';
      return 2;
    }
  }

  std::vector<int> sizes;
  if (n > 0) {
    sizes.push_back(n);
  } else {
    sizes = {2, 3, 4};  // default suite matrix
  }

  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  bool pass = true;
  for (int size : sizes) {
    spec.n = size;
    const SuiteReport rep = biham::run_suite(spec);
    print_report(rep);
    runs.push_back(biham::report_json(rep));
    pass = pass && rep.pass;
  }

  if (!json_out.empty()) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = 1;
    doc["suite_id"] = suite;
    doc["pass"] = pass;
    doc["runs"] = std::move(runs);
    std::ofstream out(json_out);
    if (!out) {
      std::cerr << "cannot write " << json_out << '\n';
      return 2;
    }
    out << doc.dump(2) << '\n';
  }
  return pass ? 0 : 1;
}

int run_simulate(const std::string& config_path, const std::string& out_dir) {
  biham::SimulationConfig config;
  try {
    config = biham::SimulationConfig::from_json_file(config_path);
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << '\n';
    return 2;
  }
  try {
    const biham::SimulationOutcome outcome = biham::run_simulation(config, out_dir);
    std::printf("trajectory: %zu samples, min regularity gap %.3e\n",
                outcome.trajectory.samples.size(), outcome.trajectory.min_gap);
    std::printf("wrote %s\nwrote %s\n", outcome.csv_path.c_str(),
                outcome.report_path.c_str());
    double worst = 0.0;
    for (const auto& d : outcome.drifts) {
      std::printf("  %-28s initial=%-13.6g max_drift=%.3e\n", d.word.c_str(),
                  d.initial_value, d.max_drift);
      worst = std::max(worst, d.max_drift);
    }
    for (const auto& d : outcome.extra_drifts) {
      std::printf("  %-28s initial=%-13.6g max_drift=%.3e\n", d.word.c_str(),
                  d.initial_value, d.max_drift);
    }
    std::printf("worst conserved-word drift: %.3e\n", worst);
    if (outcome.trajectory.aborted) {
      std::fprintf(stderr, "regularity lost at t=%.6f, trajectory truncated\n",
                   outcome.trajectory.abort_time);
      return 1;
    }
    return 0;
  } catch (const std::invalid_argument& ex) {
    std::cerr << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << ex.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for a bi-Hamiltonian hierarchy on T*U(n) "
               "and its spin Ruijsenaars-Sutherland reduction"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run a named verification suite");
  std::string suite;
  int n = 0;
  int trials = 20;
  std::uint64_t seed = 1;
  std::vector<std::string> tols;
  std::string json_out;
  verify->add_option("suite", suite, "suite id (see list-suites)")->required();
  verify->add_option("--n", n, "matrix size (default: run n = 2, 3, 4)");
  verify->add_option("--trials", trials, "random trials per check");
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--tol", tols, "tolerance override, check=value");
  verify->add_option("--json", json_out, "write the JSON report here");

  auto* simulate = app.add_subcommand("simulate", "integrate a trajectory");
  std::string config_path;
  std::string out_dir = "sim-out";
  simulate->add_option("--config", config_path, "JSON run configuration")->required();
  simulate->add_option("--out", out_dir, "output directory");

  auto* list = app.add_subcommand("list-suites", "print the suite catalogue");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify(suite, n, trials, seed, tols, json_out);
    if (simulate->parsed()) return run_simulate(config_path, out_dir);
    if (list->parsed()) {
      for (const auto& name : biham::suite_names()) {
        std::printf("%-18s %s\n", name.c_str(),
                    biham::suite_description(name).c_str());
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 2;
}
