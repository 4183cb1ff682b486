#include "bfcnn/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfcnn/csv.hpp"
#include "bfcnn/naming.hpp"

namespace bfcnn {

namespace n = names;

ConcentrationState run_phase(const BfcnnBlueprint& bp, std::size_t position,
                             const ConcentrationState& state, double T, const IntegratorConfig& cfg) {
  if (position >= bp.modules.size()) throw StructuralError("phase position out of range");
  if (state.size() != bp.global_species.size())
    throw StructuralError("state does not match the blueprint species table");
  if (T < 0.0) throw ConfigError("phase length must be nonnegative");
  const PhasedModule& m = bp.modules[position];
  if (T == 0.0 || m.kind == ModuleKind::Judgment || m.crn.size() == 0) return state;

  const auto& map = bp.local_to_global[position];
  ConcentrationState local(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) local[i] = state[map[i]];
  ConcentrationState end;
  try {
    end = integrate_endpoint(m.crn, local, T, cfg);
  } catch (const IntegrationFailure& f) {
    throw PhaseError(m.label, f);
  }
  ConcentrationState out = state;
  for (auto w : m.crn.written_species()) out[map[w]] = end[w];
  return out;
}

bool judge(const BfcnnBlueprint& bp, const PhasedModule& judgment, const ConcentrationState& state) {
  double worst = 0.0;
  for (int l = 1; l <= bp.shape.p_batch; ++l)
    worst = std::max(worst, std::max(0.0, state[bp.id(n::err(l))]));
  return worst < judgment.threshold;
}

double feasible_phase_length(const std::vector<double>& prev_diffs, double current_diff) {
  double sum = 0.0;
  for (double d : prev_diffs) sum += std::abs(d);
  if (current_diff == 0.0) return std::numeric_limits<double>::infinity();
  return std::log1p(sum / std::abs(current_diff));
}

DualRailMatrices read_weights(const BfcnnBlueprint& bp, const ConcentrationState& state) {
  DualRailMatrices w;
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) {
      w.pos[r - 1][c - 1] = state[bp.id(n::weight(1, r, c))];
      w.neg[r - 1][c - 1] = state[bp.id(n::weight(-1, r, c))];
    }
  return w;
}

IterationRecord run_iteration(const BfcnnBlueprint& bp, ConcentrationState& state, int m,
                              const ClockConfig& clock, const IntegratorConfig& cfg,
                              SignHistory* history) {
  if (!(clock.T > 0.0)) throw ConfigError("phase length T must be positive");
  const int pb = bp.shape.p_batch;
  IterationRecord rec;
  rec.iteration = m;
  rec.weights_start = read_weights(bp, state);
  rec.net_pos.assign(3, std::vector<double>(pb, 0.0));
  rec.net_neg.assign(3, std::vector<double>(pb, 0.0));
  if (history && history->sum_abs_diff.empty()) history->sum_abs_diff.assign(3, std::vector<double>(pb, 0.0));

  auto val = [&](const std::string& name) { return state[bp.id(name)]; };

  for (std::size_t pos = 0; pos < bp.modules.size(); ++pos) {
    const PhasedModule& mod = bp.modules[pos];
    if (mod.kind == ModuleKind::Judgment) {
      if (judge(bp, mod, state)) {
        rec.terminated = true;
        break;
      }
      continue;
    }
    state = run_phase(bp, pos, state, clock.T, cfg);
    if (clock.keep_snapshots) rec.snapshots.push_back({mod.label, mod.phase_index, state});

    if (mod.label == "lws-L1" || mod.label == "lws-L2") {
      const std::vector<int> nodes = mod.label == "lws-L1" ? std::vector<int>{1, 2} : std::vector<int>{3};
      double max_abs_net = 0.0;
      for (int i : nodes)
        for (int l = 1; l <= pb; ++l) {
          double np = val(n::net(1, i, l)), nn = val(n::net(-1, i, l));
          rec.net_pos[i - 1][l - 1] = np;
          rec.net_neg[i - 1][l - 1] = nn;
          double diff = std::abs(np - nn);
          max_abs_net = std::max(max_abs_net, diff);
          if (history) {
            double& sum = history->sum_abs_diff[i - 1][l - 1];
            double bound = diff == 0.0 ? std::numeric_limits<double>::infinity() : std::log1p(sum / diff);
            if (clock.T < bound)
              rec.warnings.push_back("T=" + fmt(clock.T) + " is below the sign-consistency bound " +
                                     fmt(bound) + " for node " + std::to_string(i) + " slot " +
                                     std::to_string(l));
            sum += diff;
          }
        }
      if (bp.options.k_pre <= max_abs_net)
        rec.warnings.push_back("k_pre=" + fmt(bp.options.k_pre) + " does not exceed realized |N|=" +
                               fmt(max_abs_net));
    } else if (mod.label == "annih-L1" || mod.label == "annih-L2") {
      const std::vector<int> nodes = mod.label == "annih-L1" ? std::vector<int>{1, 2} : std::vector<int>{3};
      for (int i : nodes)
        for (int l = 1; l <= pb; ++l)
          if (std::abs(val(n::net(1, i, l)) - val(n::net(-1, i, l))) < 1e-6)
            rec.degenerate.push_back(mod.label + " node " + std::to_string(i) + " slot " + std::to_string(l));
    } else if (mod.label == "sig2-L2") {
      for (int l = 1; l <= pb; ++l) rec.y.push_back(val(n::output(l)));
    } else if (mod.label == "pBCRN") {
      for (int l = 1; l <= pb; ++l) {
        rec.e.push_back(val(n::err(l)));
        rec.e_pos.push_back(val(n::err_rail(1, l)));
        rec.e_neg.push_back(val(n::err_rail(-1, l)));
      }
      rec.train_err_max = 0.0;
      for (double e : rec.e) rec.train_err_max = std::max(rec.train_err_max, std::abs(e));
    }
  }
  rec.weights = read_weights(bp, state);
  return rec;
}

TrainingTrace run_training(const BfcnnBlueprint& bp, const ClockConfig& clock, const IntegratorConfig& cfg) {
  if (!(clock.T > 0.0)) throw ConfigError("phase length T must be positive");
  if (clock.max_iterations < 0) throw ConfigError("max_iterations must be nonnegative");
  TrainingTrace trace;
  trace.clock = clock;
  ConcentrationState state = bp.initial_state;
  SignHistory history;
  for (int m = 1; m <= clock.max_iterations; ++m) {
    trace.records.push_back(run_iteration(bp, state, m, clock, cfg, &history));
    if (trace.records.back().terminated) {
      trace.terminated_at = m;
      break;
    }
  }
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace bfcnn
