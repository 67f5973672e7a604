#pragma once

#include "mrfsi/adaptivity.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrfsi {

enum class ExperimentKind { primal, decoupler_compare, convergence, adaptive, render };

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& name);

struct RunConfig {
  PhysicalParams physics;
  double T = 1.0;
  int N = 50;
  int M = 1;
  int L = 1;
  int config_id = 1;
  GoalKind functional = GoalKind::fluid;
  DecouplerConfig decoupler;
  AdjointConfig adjoint;
  ExperimentKind experiment = ExperimentKind::primal;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int adaptive_steps = 4;
  /// Macro counts of the uniform family used by convergence runs and by the
  /// reference extrapolation of adaptive runs; consecutive entries double.
  std::vector<int> levels = {50, 100, 200, 400};
  /// Skips the reference extrapolation when set.
  std::optional<double> reference;
};

/// Parse failure; the message starts with "<source>:<line>: ".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// `key = value` lines, `#` starts a comment, pairs as `a, b`.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config(const std::filesystem::path& path);

struct DecouplerRow {
  int step = 0;
  std::string method;
  int evaluations = 0;
  int newton_iterations = 0;
  double final_residual = 0.0;
};

struct ConvergenceRow {
  int N = 0;
  int M = 0;
  int L = 0;
  double goal = 0.0;
  ErrorBreakdown breakdown;
  std::optional<double> error;
  std::optional<double> eff;
};

struct RunReport {
  RunConfig config;
  std::optional<double> goal;
  std::vector<DecouplerRow> decoupler;
  std::vector<ConvergenceRow> convergence;
  std::optional<Extrapolation> extrapolation;
  std::vector<AdaptiveRecord> adaptive;
  std::vector<TimePartition> meshes;
};

RunReport run_experiment(const RunConfig& cfg);

/// Writes report.json and, when the report holds them, convergence.csv,
/// decoupler.csv and mesh_step<k>.svg. Creates `dir` if needed.
void emit_reports(const RunReport& report, const std::filesystem::path& dir);

/// Three rows of node ticks: fluid (top, blue), macro (middle, black),
/// solid (bottom, red).
std::string render_time_mesh(const TimePartition& p);

/// Uniform family over cfg.levels, J only, extrapolated from the three finest.
Extrapolation reference_from_levels(const RunConfig& cfg, const OperatorSet& ops);

}  // namespace mrfsi
