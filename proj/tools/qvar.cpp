// qvar: run a readout-training experiment and write its CSV tables.
//
//   qvar run mixture n=5 r=0.25 m=1,3,5 layers=5 --seed 7 --out mix
//   qvar run analytic n=5 r=0.25 m=3
//   qvar run ising --config ising.cfg --naimark 1
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qvar/experiment.hpp"
#include "qvar/mixture.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qvar::ConfigError("cannot read config file " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-aware training of rank-constrained quantum readouts"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment and write CSV tables");
  std::string experiment;
  std::vector<std::string> overrides;
  std::string config_path;
  std::string out;
  std::optional<long long> seed;
  std::optional<int> restarts;
  std::optional<int> eval_points;
  std::optional<int> naimark;
  run->add_option("experiment", experiment, "mixture | ising | schwinger | cluster | analytic")
      ->required();
  run->add_option("settings", overrides, "key=value overrides");
  run->add_option("--config", config_path, "flat key=value config file");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--restarts", restarts, "training restarts per m");
  run->add_option("--eval-points", eval_points, "evaluation grid size (default 101)");
  run->add_option("--naimark", naimark, "read m_a ancilla qubits instead of system qubits");
  run->add_option("--out", out, "output stem; writes <stem>_m<m>.csv and <stem>.config.txt");

  auto* selftest = app.add_subcommand("selftest", "Check closed forms against dense oracles");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto check = qvar::mixture::self_test();
    if (!check.passed()) {
      for (const auto& f : check.failures) std::cerr << "self-test: " << f << '\n';
      return kRuntimeError;
    }
    if (selftest->parsed()) {
      std::cout << "closed forms agree with dense oracles\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "self-test failed: " << e.what() << '\n';
    return kRuntimeError;
  }

  qvar::ExperimentConfig config(experiment.empty() ? "mixture" : experiment);
  try {
    if (std::find(qvar::kExperiments.begin(), qvar::kExperiments.end(), experiment) ==
        qvar::kExperiments.end()) {
      throw qvar::ConfigError("unknown experiment '" + experiment + "'");
    }
    config = config_path.empty() ? qvar::ExperimentConfig(experiment)
                                 : qvar::ExperimentConfig::from_text(read_file(config_path), experiment);
    for (const auto& token : overrides) config.set_token(token);
    if (seed) config.set("seed", std::to_string(*seed));
    if (restarts) config.set("restarts", std::to_string(*restarts));
    if (eval_points) config.set("eval_points", std::to_string(*eval_points));
    if (naimark) config.set("naimark", std::to_string(*naimark));
    config.validate();
  } catch (const qvar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const qvar::ExperimentResult result = qvar::run_experiment(config);
    const std::string stem = out.empty() ? experiment : out;
    for (const auto& path : qvar::write_outputs(stem, config, result)) std::cout << path << '\n';
    for (const auto& t : result.tables) {
      if (t.training && !t.training->converged) {
        std::cerr << "warning: m=" << t.m << " training did not reach the gradient tolerance\n";
      }
    }
  } catch (const qvar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
