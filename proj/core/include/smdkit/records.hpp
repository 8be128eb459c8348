#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smdkit {

enum class StepRule { fixed, inverse_k };

struct SolverConfig {
  long iterations = 0;   /* N */
  double radius = 1.0;   /* R, with R^2 >= V(x_*, x0) */
  StepRule step_rule = StepRule::fixed;
  std::uint64_t seed = 0;
  /* Every trace_stride steps the runner records the raw iterate and, when the
   * oracle knows its objective, the optimality gap of the running average.
   * 0 disables traces. */
  long trace_stride = 0;
  /* Override of the geometry's start point (must be feasible). */
  std::optional<std::vector<double>> start;
};

struct RunRecord {
  std::vector<double> average;  /* uniform average of the iterates */
  std::vector<long> trace_steps;
  std::vector<std::vector<double>> trace_iterates;
  std::vector<double> trace_gaps;  /* gap of the running average */
  std::optional<double> final_gap;
  long oracle_calls = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
  /* Per-trajectory averages, in trajectory order (parallel runs only). */
  std::vector<std::vector<double>> trajectory_averages;
};

}  // namespace smdkit
