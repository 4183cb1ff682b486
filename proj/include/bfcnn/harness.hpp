#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bfcnn/error_lab.hpp"
#include "bfcnn/fcnn_ref.hpp"
#include "bfcnn/integrate.hpp"
#include "bfcnn/netbuild.hpp"
#include "bfcnn/scheduler.hpp"

namespace bfcnn {

inline constexpr const char* kVersion = "0.1.0";

struct BoundsConfig {
  int m = 0;
  double T = 0.0;
  int p_batch = 1;
  std::vector<IterationCoefficients> coeffs;  // iteration 1..n
  std::optional<std::array<double, 3>> envelope;  // a, b, delta
};

struct ModuleConfig {
  std::string label;     // a blueprint module label, or empty
  std::string crn_file;  // or a CRN text file
  double duration = 0.0;
  std::size_t samples = 101;
  std::map<std::string, double> initial;
};

struct RunConfig {
  std::string dataset = "OR";
  int p_batch = 2;
  std::vector<double> T_grid;
  double k = 2.0;
  double k_pre = 4.0;
  double eta = 0.5;
  double threshold = 0.1;
  int max_iterations = 10;
  std::uint64_t seed = 42;
  std::filesystem::path output = "results";
  bool trace = false;
  bool emit_crn = false;
  int parallelism = 1;
  double c = 1.0;
  IntegratorConfig integrator;
  std::optional<DualRailMatrices> initial_weights;
  ModuleConfig module;
  BoundsConfig bounds;

  std::filesystem::path base_dir;  // relative dataset / crn paths resolve here
  std::string source_text;         // echoed into manifests
};

// Key=value file with [section] headers; '#' and ';' start comment lines.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
// Checks every module precondition that does not need a simulation.
void validate_config(const RunConfig& cfg);

// "OR", "XOR" or a CSV of x1,x2,d (optional header). Warnings for d outside [0,1].
DatasetSpec load_dataset(const std::string& name_or_path, const std::filesystem::path& base_dir = {},
                         std::vector<std::string>* warnings = nullptr);

// Uniform [0.1, 0.9] on the positive rail, zero negative rail.
DualRailMatrices default_initial_weights(std::uint64_t seed);

BuildOptions build_options(const RunConfig& cfg);
BfcnnBlueprint blueprint_for(const RunConfig& cfg, const DatasetSpec& ds);

// One training run at one T with the reference stepped alongside.
struct RunResult {
  double T = 0.0;
  std::vector<IterationRecord> records;
  std::vector<ReferenceState> reference;  // [0] initial, [m] after iteration m
  std::vector<ErrorRecord> errors;
  std::optional<int> terminated_at;
  std::vector<std::string> warnings;
  std::optional<std::string> failure;
  double seconds = 0.0;
};

RunResult run_lockstep(const BfcnnBlueprint& bp, const RunConfig& cfg, double T);

// Output root: BFCNN_OUTPUT_ROOT if set, else cfg.output.
std::filesystem::path output_root(const RunConfig& cfg);
std::string T_dirname(double T);

// CSV bodies (deterministic; no timings).
std::string trace_csv(const std::string& dataset, const RunResult& r);
std::string errors_csv(const std::string& dataset, const RunResult& r);
std::string weights_csv(const RunResult& r, bool reference);
std::string outputs_csv(const BfcnnBlueprint& bp, const RunResult& r);
std::string snapshots_csv(const BfcnnBlueprint& bp, const RunResult& r);

// Writes trace.csv, errors.csv, weights.csv, reference_weights.csv, outputs.csv,
// manifest.txt (and snapshots.csv with trace) under dir.
void write_run_dir(const std::filesystem::path& dir, const BfcnnBlueprint& bp, const RunConfig& cfg,
                   const RunResult& r, const std::string& command);

// Runs every T in the grid, serially or over OpenMP threads; result order follows the grid.
std::vector<RunResult> run_sweep_points(const BfcnnBlueprint& bp, const RunConfig& cfg, bool parallel);

struct FitRow {
  int iteration = 0;
  FitResult fit;
};
// Per-iteration fits over T; iterations with fewer than 4 usable points are skipped.
std::vector<FitRow> fit_by_iteration(const std::vector<RunResult>& runs, bool trimmed);
std::string fit_csv(const std::string& dataset, const std::vector<FitRow>& rows);

// Subcommands. Return a process exit code (0 ok, 1 failure).
int cmd_train(const RunConfig& cfg, const std::string& config_path);
int cmd_sweep(const RunConfig& cfg, const std::string& config_path);
int cmd_simulate_module(const RunConfig& cfg, const std::string& config_path);
int cmd_bounds(const RunConfig& cfg, const std::string& config_path);
int cmd_oracle_check(const RunConfig& cfg, const std::string& config_path);

struct OracleCase {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  bool pass() const;
};
std::vector<OracleCase> oracle_cases(const IntegratorConfig& cfg);

}  // namespace bfcnn
