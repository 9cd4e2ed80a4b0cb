#pragma once

// Seeded experiment runs producing per-m tables of predictions, variances and
// Fisher bounds, plus their CSV and config-sidecar serializations.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvar/fisher.hpp"
#include "qvar/training.hpp"

namespace qvar {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> kExperiments = {"mixture", "ising", "schwinger", "cluster",
                                                      "analytic"};

/// Flat key=value configuration. Every experiment has a full set of
/// defaults; unknown keys are rejected.
class ExperimentConfig {
 public:
  explicit ExperimentConfig(std::string experiment);

  /// Parses `key=value` lines; blank lines and lines starting with '#' are
  /// skipped. An `experiment=` line is honoured if `experiment` is empty.
  static ExperimentConfig from_text(const std::string& text, const std::string& experiment = "");

  void set(const std::string& key, const std::string& value);
  /// Applies a single "key=value" token.
  void set_token(const std::string& token);

  [[nodiscard]] const std::string& experiment() const { return experiment_; }
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

  [[nodiscard]] std::string text(const std::string& key) const;
  [[nodiscard]] int integer(const std::string& key) const;
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] std::vector<int> integer_list(const std::string& key) const;

  /// Checks types and ranges of every field; throws ConfigError.
  void validate() const;
  /// Sorted key=value lines, experiment first.
  [[nodiscard]] std::string dump() const;

 private:
  std::string experiment_;
  std::map<std::string, std::string> values_;
};

struct Row {
  double alpha = 0.0;
  double prediction = 0.0;
  double sq_error = 0.0;
  double variance = 0.0;
  double inv_cfi = 0.0;
  double inv_qfi = 0.0;
  std::optional<double> analytic_variance;
  double adjusted_variance = 0.0;  // not serialized; kept for checks
  std::string flag = "ok";
};

struct Table {
  int m = 1;
  std::vector<Row> rows;
  std::optional<TrainResult> training;
};

struct ExperimentResult {
  std::vector<Table> tables;
};

/// The labeled family an experiment trains on, and its label range.
StateFamily experiment_family(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "alpha,prediction,sq_error,variance,inv_cfi,inv_qfi,analytic_variance,flag";

void write_csv(std::ostream& out, const Table& table);
void write_sidecar(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result);

/// Writes `<stem>_m<m>.csv` per table and `<stem>.config.txt`; returns the
/// paths written.
std::vector<std::string> write_outputs(const std::string& stem, const ExperimentConfig& config,
                                       const ExperimentResult& result);

}  // namespace qvar
