#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "algograph/backend.hpp"
#include "algograph/cost_model.hpp"
#include "algograph/mock_backend.hpp"
#include "algograph/tasks.hpp"

namespace algograph::harness {

enum class SweepMode { vary_n, vary_m };

struct BackendSpec {
  enum class Kind { mock, http };
  Kind kind = Kind::mock;
  std::string profile = "exact";  // mock
  std::string url;                // http
  std::string model;
  std::optional<double> temperature;
  std::size_t max_in_flight = 4;

  /// "mock:<profile>" or "http:<url>". Throws ConfigError.
  static BackendSpec parse(std::string_view text);
};

struct SweepConfig {
  tasks::TaskKind task = tasks::TaskKind::counting;
  SweepMode mode = SweepMode::vary_m;
  std::vector<std::size_t> n_values;  // one entry for vary-m
  std::vector<std::size_t> m_values;  // unused for vary-n (m = n)
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  BackendSpec backend;
  CostModel cost_model;
  std::vector<Parallelism> extra_parallelism;  // beyond 1, 4, inf
  std::map<std::string, MockProfile> profiles;
  tasks::MergeMode merge = tasks::MergeMode::hierarchical;
  bool needle_present = true;
  std::size_t workers = 1;
  double failure_threshold = 0.5;
  std::string output;
};

/// Parses and validates a YAML sweep description. Errors carry
/// "<source>:<line>:<column>: " prefixes.
SweepConfig parse_config(const std::string& text, const std::string& source = "<config>");
SweepConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the first semantic problem.
void validate_config(const SweepConfig& config);

/// Built-in ("exact", "default", "type1") or config-declared profile.
MockProfile resolve_profile(const SweepConfig& config, const std::string& name);

std::unique_ptr<LlmBackend> make_backend(const SweepConfig& config);

struct GridPoint {
  std::size_t n = 0;
  std::size_t m = 0;
  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

std::vector<GridPoint> grid(const SweepConfig& config);

std::uint64_t trial_seed(std::uint64_t base, GridPoint point, std::size_t trial);

struct TrialRow {
  GridPoint point;
  std::size_t k = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string warning;
  std::vector<double> metrics;    // SweepResult::metric_columns order
  std::vector<double> costs;      // SweepResult::cost_columns order
  std::optional<double> wall_ms;  // real backends only
};

struct SweepResult {
  tasks::TaskKind task = tasks::TaskKind::counting;
  SweepMode mode = SweepMode::vary_m;
  std::vector<std::string> metric_columns;
  std::vector<std::string> cost_columns;
  std::vector<TrialRow> rows;  // sorted by (n, m, trial)

  std::size_t failures() const;
  bool exceeded(double threshold) const;
};

struct SweepOptions {
  std::optional<std::filesystem::path> dump_instances;
};

/// Metric column names for a task.
std::vector<std::string> metric_columns(tasks::TaskKind task);

/// Metric values for one solved instance, in metric_columns(task) order.
std::vector<double> compute_metrics(const tasks::Instance& instance, const tasks::SolveResult& result);

SweepResult run_sweep(const SweepConfig& config, const LlmBackend& backend,
                      const SweepOptions& options = {});

void write_csv(std::ostream& out, const SweepResult& result);

struct SummaryRow {
  GridPoint point;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::vector<double> mean;  // metric columns then cost columns
  std::vector<double> stddev;
};

struct Summary {
  tasks::TaskKind task = tasks::TaskKind::counting;
  SweepMode mode = SweepMode::vary_m;
  std::vector<std::string> columns;
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

/// Mean and population standard deviation per grid point; failed rows excluded.
Summary summarize(const SweepResult& result);
void write_summary_csv(std::ostream& out, const Summary& summary);

struct PredictionRow {
  GridPoint point;
  std::size_t k = 0;
  double cost = 0.0;
  double latency = 0.0;
  std::size_t optimal_m_cost = 0;
  std::size_t optimal_m_latency = 0;
};

/// Decode length assumed per call: O(1) except sorting (O(m)).
DecodeLength decode_length(tasks::TaskKind task);
DecompositionKind decomposition_rule(tasks::TaskKind task);

std::vector<PredictionRow> predict(const SweepConfig& config);
void write_prediction_csv(std::ostream& out, const SweepConfig& config,
                          const std::vector<PredictionRow>& rows);

std::string_view to_string(SweepMode mode);

}  // namespace algograph::harness
