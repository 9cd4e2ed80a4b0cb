#include "qvar/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qvar/hamiltonians.hpp"
#include "qvar/mixture.hpp"

#ifndef QVAR_VERSION
#define QVAR_VERSION "unknown"
#endif

namespace qvar {
namespace {

using Defaults = std::map<std::string, std::string>;

Defaults training_defaults() {
  return {{"ansatz", "hea"},   {"layers", "2"},        {"ring", "1"},         {"train_points", "10"},
          {"eval_points", "101"}, {"seed", "1"},       {"restarts", "5"},     {"max_iters", "2000"},
          {"w_ls", "1"},       {"w_var", "1e-4"},      {"conv_tol", "1e-7"},  {"grad_step", "1e-5"},
          {"gradient", "adjoint"}, {"naimark", "0"}, {"closing", "0"}};
}

Defaults defaults_for(const std::string& experiment) {
  if (experiment == "analytic") {
    return {{"n", "5"}, {"r", "0.25"}, {"m", "1,3,5"}, {"eval_points", "101"},
            {"lo", "0"}, {"hi", "1"},  {"seed", "1"}};
  }
  Defaults d = training_defaults();
  auto put = [&](const Defaults& extra) {
    for (const auto& [k, v] : extra) d[k] = v;
  };
  if (experiment == "mixture") {
    put({{"n", "5"}, {"r", "0.25"}, {"m", "1,3,5"}, {"layers", "5"}, {"lo", "0"}, {"hi", "1"}});
  } else if (experiment == "ising") {
    put({{"n", "3"}, {"m", "1"}, {"layers", "2"}, {"closing", "1"}, {"lo", "0.05"}, {"hi", "2"}});
  } else if (experiment == "schwinger") {
    // Open-chain convolutions for this model; the two-qubit block before readout stays.
    put({{"n", "8"}, {"m", "1,2"}, {"ansatz", "qcnn"}, {"ring", "0"}, {"lo", "-2"}, {"hi", "1"},
         {"w", "1"}, {"g", "1"}, {"eps0", "0"}});
  } else if (experiment == "cluster") {
    put({{"n", "8"}, {"m", "1,3"}, {"ansatz", "qcnn"}, {"layers", "10"}, {"lo", "0"}, {"hi", "1"},
         {"eps", "0.01"}});
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

RealVector linspace(double lo, double hi, int count) {
  RealVector out(count);
  for (int i = 0; i < count; ++i) {
    out(i) = count == 1 ? lo : (i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

// Parameter-to-Hamiltonian map of the lattice experiments; empty for mixtures.
std::function<Matrix(double)> lattice_hamiltonian(const ExperimentConfig& c) {
  const std::string& e = c.experiment();
  const int n = c.integer("n");
  if (e == "ising") return [n](double h) { return ising(n, h); };
  if (e == "schwinger") {
    const SchwingerCouplings couplings{c.real("w"), c.real("g"), c.real("eps0")};
    return [n, couplings](double mu) { return schwinger(n, mu, couplings); };
  }
  if (e == "cluster") {
    const double eps = c.real("eps");
    return [n, eps](double x) { return cluster(n, x, eps); };
  }
  return {};
}

StateFamily ground_family(std::function<Matrix(double)> hamiltonian, double lo, double hi) {
  return {[h = std::move(hamiltonian)](double a) { return LabeledState(ground_state(h(a)).psi, a); },
          lo, hi};
}

StateFamily embedded(const StateFamily& family, int ancillas) {
  if (ancillas == 0) return family;
  return {[family, ancillas](double a) { return naimark_embed(family.evaluator(a), ancillas); },
          family.lo, family.hi};
}

Circuit build_circuit(const ExperimentConfig& c, int qubits, int m) {
  const std::string ansatz = c.text("ansatz");
  if (ansatz == "hea") return hea(qubits, c.integer("layers"), c.integer("closing") != 0);
  if (ansatz == "qcnn") return qcnn(qubits, c.integer("ring") != 0, m);
  if (ansatz == "hva") {
    if (c.experiment() != "cluster" || c.integer("naimark") != 0) {
      throw ConfigError("ansatz=hva is only defined for the cluster experiment without ancillas");
    }
    return hva_cluster(qubits, c.integer("layers"));
  }
  throw ConfigError("unknown ansatz '" + ansatz + "'");
}

TrainConfig train_config(const ExperimentConfig& c) {
  TrainConfig t;
  t.w_ls = c.real("w_ls");
  t.w_var = c.real("w_var");
  t.seed = static_cast<std::uint64_t>(c.integer("seed"));
  t.restarts = c.integer("restarts");
  t.max_iters = c.integer("max_iters");
  t.conv_tol = c.real("conv_tol");
  t.grad_step = c.real("grad_step");
  t.gradient = c.text("gradient") == "fd" ? GradientMethod::kFiniteDifference : GradientMethod::kAdjoint;
  return t;
}

bool interior(const StateFamily& family, double alpha) {
  return family.contains(alpha - kProbabilityStep) && family.contains(alpha + kProbabilityStep);
}

void append_flag(Row& row, const std::string& flag) {
  row.flag = row.flag == "ok" ? flag : row.flag + "|" + flag;
}

void fill_chain(Row& row, const FisherReport& report) {
  row.inv_cfi = report.inv_cfi;
  row.inv_qfi = report.inv_qfi;
  row.adjusted_variance = report.adjusted_variance;
  for (const auto& d : report.diagnostics) append_flag(row, d);
}

void mark_boundary(Row& row) {
  row.inv_cfi = std::numeric_limits<double>::quiet_NaN();
  row.inv_qfi = std::numeric_limits<double>::quiet_NaN();
  row.adjusted_variance = std::numeric_limits<double>::quiet_NaN();
  append_flag(row, "boundary");
}

std::optional<double> mixture_analytic(const ExperimentConfig& c, int m, double alpha) {
  const int n = c.integer("n");
  const double r = c.real("r");
  const int ancillas = c.experiment() == "analytic" ? 0 : c.integer("naimark");
  if (ancillas > 0) {
    // Ancilla readout realizes any projectors; only the outcome count limits it.
    const RealVector lambdas = mixture::optimal_eigenvalues_full(n, r);
    std::set<long long> distinct;
    for (double l : lambdas) distinct.insert(std::llround(l * 1e9));
    if (static_cast<double>(distinct.size()) > std::ldexp(1.0, ancillas)) return std::nullopt;
    return mixture::variance_full(alpha, n, r);
  }
  return m >= n ? mixture::variance_full(alpha, n, r) : mixture::variance_partial(alpha, m);
}

ExperimentResult run_analytic(const ExperimentConfig& c) {
  const auto model = mixture::MixtureModel::ghz(c.integer("n"), c.real("r"));
  const StateFamily family = model.family();
  const RealVector grid = linspace(c.real("lo"), c.real("hi"), c.integer("eval_points"));
  ExperimentResult result;
  for (int m : c.integer_list("m")) {
    const SpectralObservable obs =
        mixture::optimal_observable_matrix(model, m >= model.n ? std::nullopt : std::optional<int>(m));
    Table table;
    table.m = m;
    for (double a : grid) {
      Row row;
      row.alpha = a;
      const RealVector p = probabilities(obs, family.at(a));
      row.prediction = expectation_from(p, obs.lambdas);
      row.sq_error = (row.prediction - a) * (row.prediction - a);
      row.variance = variance_from(p, obs.lambdas);
      row.analytic_variance = mixture_analytic(c, m, a);
      if (interior(family, a)) {
        fill_chain(row, chain_report([&](const LabeledState& s) { return probabilities(obs, s); },
                                     obs.lambdas, family, a));
      } else {
        mark_boundary(row);
      }
      table.rows.push_back(std::move(row));
    }
    result.tables.push_back(std::move(table));
  }
  return result;
}

ExperimentResult run_trained(const ExperimentConfig& c) {
  const StateFamily base = experiment_family(c);
  const int ancillas = c.integer("naimark");
  const StateFamily family = embedded(base, ancillas);
  const int qubits = c.integer("n") + ancillas;
  std::vector<int> ms = ancillas > 0 ? std::vector<int>{ancillas} : c.integer_list("m");
  const TrainConfig tc = train_config(c);
  const TrainSet trainset = make_trainset(family, c.integer("train_points"), family.lo, family.hi);
  const RealVector grid = linspace(family.lo, family.hi, c.integer("eval_points"));
  const auto hamiltonian = lattice_hamiltonian(c);

  ExperimentResult result;
  for (int m : ms) {
    const Circuit circuit = build_circuit(c, qubits, m);
    TrainResult trained = train(circuit, m, trainset, tc);
    const ParamObservable obs(m, trained.lambdas, circuit);
    Table table;
    table.m = m;
    for (double a : grid) {
      Row row;
      row.alpha = a;
      const RealVector p = probabilities(obs, trained.theta, family.at(a));
      row.prediction = expectation_from(p, obs.lambdas);
      row.sq_error = (row.prediction - a) * (row.prediction - a);
      row.variance = variance_from(p, obs.lambdas);
      if (c.experiment() == "mixture") row.analytic_variance = mixture_analytic(c, m, a);
      if (interior(family, a)) {
        fill_chain(row, chain_report(
                            [&](const LabeledState& s) { return probabilities(obs, trained.theta, s); },
                            obs.lambdas, family, a));
      } else {
        mark_boundary(row);
      }
      if (hamiltonian && ground_state(hamiltonian(a)).degenerate) append_flag(row, "degenerate");
      if (!trained.converged) append_flag(row, "not_converged");
      table.rows.push_back(std::move(row));
    }
    table.training = std::move(trained);
    result.tables.push_back(std::move(table));
  }
  return result;
}

}  // namespace

ExperimentConfig::ExperimentConfig(std::string experiment)
    : experiment_(std::move(experiment)), values_(defaults_for(experiment_)) {}

ExperimentConfig ExperimentConfig::from_text(const std::string& text, const std::string& experiment) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string name = experiment;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") {
      if (name.empty()) name = value;
      continue;
    }
    entries.emplace_back(key, value);
  }
  if (name.empty()) throw ConfigError("config does not name an experiment");
  ExperimentConfig config(name);
  for (const auto& [k, v] : entries) config.set(k, v);
  return config;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("unknown key '" + key + "' for experiment " + experiment_);
  }
  it->second = value;
}

void ExperimentConfig::set_token(const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + token + "'");
  set(trim(token.substr(0, eq)), trim(token.substr(eq + 1)));
}

std::string ExperimentConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

int ExperimentConfig::integer(const std::string& key) const {
  const std::string v = text(key);
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(v, &used);
    if (used != v.size() || parsed < std::numeric_limits<int>::min() ||
        parsed > std::numeric_limits<int>::max()) {
      throw std::invalid_argument(v);
    }
    return static_cast<int>(parsed);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

double ExperimentConfig::real(const std::string& key) const {
  const std::string v = text(key);
  try {
    std::size_t used = 0;
    const double parsed = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(parsed)) throw std::invalid_argument(v);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::vector<int> ExperimentConfig::integer_list(const std::string& key) const {
  const std::string v = text(key);
  std::vector<int> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    try {
      std::size_t used = 0;
      const int parsed = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(parsed);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a comma-separated integer list, got '" + v + "'");
    }
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  return out;
}

void ExperimentConfig::validate() const {
  const int n = integer("n");
  if (n < 2 || n > 12) throw ConfigError("n must lie in 2..12");
  if (values_.contains("r")) {
    const double r = real("r");
    if (r < 0.0 || r > 1.0) throw ConfigError("r must lie in [0, 1]");
  }
  if (!(real("lo") < real("hi"))) throw ConfigError("need lo < hi");
  if (integer("eval_points") < 2) throw ConfigError("eval_points must be >= 2");
  const bool analytic = experiment_ == "analytic";
  const int ancillas = analytic ? 0 : integer("naimark");
  if (ancillas < 0 || n + ancillas > 12) throw ConfigError("naimark must be >= 0 with n + naimark <= 12");
  // With ancillas the readout is the ancilla register and m is ignored.
  if (ancillas == 0) {
    for (int m : integer_list("m")) {
      if (m < 1 || m > n) throw ConfigError("every m must lie in 1..n");
    }
  }
  if (experiment_ == "mixture" || analytic) {
    if (real("lo") < 0.0 || real("hi") > 1.0) throw ConfigError("mixture labels must lie in [0, 1]");
  }
  if (experiment_ == "schwinger" && n % 2 != 0) throw ConfigError("schwinger needs even n");
  if (experiment_ == "cluster" && n < 3) throw ConfigError("cluster needs n >= 3");
  if (analytic) return;
  const std::string ansatz = text("ansatz");
  if (ansatz != "hea" && ansatz != "qcnn" && ansatz != "hva") {
    throw ConfigError("ansatz must be hea, qcnn or hva");
  }
  if (ansatz == "hva" && experiment_ != "cluster") throw ConfigError("ansatz=hva needs the cluster experiment");
  if (integer("layers") < 1) throw ConfigError("layers must be >= 1");
  if (const int closing = integer("closing"); closing != 0 && closing != 1) {
    throw ConfigError("closing must be 0 or 1");
  }
  if (integer("train_points") < 2) throw ConfigError("train_points must be >= 2");
  const std::string g = text("gradient");
  if (g != "adjoint" && g != "fd") throw ConfigError("gradient must be adjoint or fd");
  if (integer("seed") < 0) throw ConfigError("seed must be nonnegative");
  try {
    train_config(*this).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (ansatz == "qcnn") {
    const std::vector<int> ms = ancillas > 0 ? std::vector<int>{ancillas} : integer_list("m");
    for (int m : ms) {
      if (qcnn_levels(n + ancillas, m) < 1) {
        throw ConfigError("qcnn cannot pool " + std::to_string(n + ancillas) + " qubits down to m=" +
                          std::to_string(m));
      }
    }
  }
}

std::string ExperimentConfig::dump() const {
  std::string out = "experiment=" + experiment_ + "\n";
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

StateFamily experiment_family(const ExperimentConfig& c) {
  const std::string& e = c.experiment();
  const double lo = c.real("lo");
  const double hi = c.real("hi");
  if (e == "mixture" || e == "analytic") {
    StateFamily f = mixture::MixtureModel::ghz(c.integer("n"), c.real("r")).family();
    f.lo = lo;
    f.hi = hi;
    return f;
  }
  if (auto h = lattice_hamiltonian(c)) return ground_family(std::move(h), lo, hi);
  throw ConfigError("unknown experiment '" + e + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  return config.experiment() == "analytic" ? run_analytic(config) : run_trained(config);
}

void write_csv(std::ostream& out, const Table& table) {
  out << kCsvHeader << '\n';
  for (const Row& r : table.rows) {
    out << format_number(r.alpha) << ',' << format_number(r.prediction) << ','
        << format_number(r.sq_error) << ',' << format_number(r.variance) << ','
        << format_number(r.inv_cfi) << ',' << format_number(r.inv_qfi) << ','
        << (r.analytic_variance ? format_number(*r.analytic_variance) : std::string()) << ','
        << r.flag << '\n';
  }
}

void write_sidecar(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result) {
  out << "# qvar " << QVAR_VERSION << '\n' << config.dump();
  for (const Table& t : result.tables) {
    if (!t.training) continue;
    out << "# m=" << t.m << " loss=" << format_number(t.training->loss)
        << " iterations=" << t.training->iterations
        << " converged=" << (t.training->converged ? "yes" : "no") << '\n';
  }
}

std::vector<std::string> write_outputs(const std::string& stem, const ExperimentConfig& config,
                                       const ExperimentResult& result) {
  std::vector<std::string> written;
  auto open = [&](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
    return f;
  };
  for (const Table& t : result.tables) {
    auto f = open(stem + "_m" + std::to_string(t.m) + ".csv");
    write_csv(f, t);
  }
  auto f = open(stem + ".config.txt");
  write_sidecar(f, config, result);
  return written;
}

}  // namespace qvar
