#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfcnn/integrate.hpp"
#include "bfcnn/netbuild.hpp"

namespace bfcnn {

struct ClockConfig {
  double T = 0.0;
  int max_iterations = 10;
  bool keep_snapshots = false;  // per-phase endpoints in the records
};

// An integration failure inside a phase, tagged with the phase label.
struct PhaseError : std::runtime_error {
  PhaseError(const std::string& label, const IntegrationFailure& f)
      : std::runtime_error("phase " + label + ": " + f.what()),
        label(label), last_state(f.last_state), last_time(f.last_time) {}
  std::string label;
  ConcentrationState last_state;  // module-local species order
  double last_time;
};

struct PhaseSnapshot {
  std::string label;
  int phase_index = 0;
  ConcentrationState state;  // global state after the phase
};

struct IterationRecord {
  int iteration = 0;
  DualRailMatrices weights_start;
  DualRailMatrices weights;  // after learn-update (unchanged when terminated)
  // Net-input rails right after the weighted-sum phases: index [node-1][slot-1].
  std::vector<std::vector<double>> net_pos, net_neg;
  std::vector<double> y;       // output species at the end of the output sigmoid
  std::vector<double> e;       // E_l after pre-calculation
  std::vector<double> e_pos, e_neg;
  double train_err_max = 0.0;
  bool terminated = false;
  std::vector<std::string> degenerate;  // "annih-L1 node 1 slot 2" etc.
  std::vector<std::string> warnings;
  std::vector<PhaseSnapshot> snapshots;
};

struct TrainingTrace {
  std::vector<IterationRecord> records;
  std::optional<int> terminated_at;
  ClockConfig clock;
  ConcentrationState final_state;
};

// Advances the write set of one phase by T; every other species is copied through.
ConcentrationState run_phase(const BfcnnBlueprint& bp, std::size_t position,
                             const ConcentrationState& state, double T,
                             const IntegratorConfig& cfg = {});

// True when max_l E_l < threshold.
bool judge(const BfcnnBlueprint& bp, const PhasedModule& judgment, const ConcentrationState& state);

// Running history for the net-input sign check, keyed by [node-1][slot-1].
struct SignHistory {
  std::vector<std::vector<double>> sum_abs_diff;
};

IterationRecord run_iteration(const BfcnnBlueprint& bp, ConcentrationState& state, int m,
                              const ClockConfig& clock, const IntegratorConfig& cfg,
                              SignHistory* history = nullptr);

TrainingTrace run_training(const BfcnnBlueprint& bp, const ClockConfig& clock,
                           const IntegratorConfig& cfg = {});

// Lower bound on T for the alternating relax/annihilate pair: ln(1 + sum|hist| / |current|).
// +inf when current is zero.
double feasible_phase_length(const std::vector<double>& prev_diffs, double current_diff);

DualRailMatrices read_weights(const BfcnnBlueprint& bp, const ConcentrationState& state);

}  // namespace bfcnn
