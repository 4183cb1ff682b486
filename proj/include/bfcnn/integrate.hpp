#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "bfcnn/crn.hpp"

namespace bfcnn {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  std::optional<double> max_step;           // default: duration / 10
  std::optional<std::size_t> dense_samples;  // >= 2 uniformly spaced samples including both ends
  std::size_t max_steps = 5'000'000;
  bool parallel_rhs = false;  // use ParallelDerivative for the right-hand side
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ConcentrationState> states;
  ConcentrationState endpoint;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

struct IntegrationFailure : std::runtime_error {
  IntegrationFailure(const std::string& what, ConcentrationState last_state, double last_time)
      : std::runtime_error(what), last_state(std::move(last_state)), last_time(last_time) {}
  ConcentrationState last_state;
  double last_time;
};

using Rhs = std::function<void(std::span<const double>, std::span<double>)>;

// Dormand-Prince 5(4) with adaptive steps and the order-4 continuous extension.
Trajectory integrate(const Crn& crn, const ConcentrationState& x0, double duration,
                     const IntegratorConfig& cfg = {});
ConcentrationState integrate_endpoint(const Crn& crn, const ConcentrationState& x0, double duration,
                                      const IntegratorConfig& cfg = {});

// Same method on an arbitrary right-hand side (no clamp validation of x0).
Trajectory integrate_rhs(const Rhs& f, const std::vector<double>& x0, double duration,
                         const IntegratorConfig& cfg, bool check_nonnegative);

void write_trajectory_csv(std::ostream& out, const Crn& crn, const Trajectory& traj);

}  // namespace bfcnn
