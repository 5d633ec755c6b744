#pragma once

// Derivative-free minimisation by linear interpolation on a simplex with a
// shrinking trust region, in the manner of Powell's COBYLA (unconstrained
// case). The simplex holds n + 1 evaluated points; each iteration fits the
// linear model through them, steps a distance rho downhill from the best
// vertex and swaps the trial point into the simplex. rho halves whenever a
// step fails to deliver a tenth of its predicted decrease on a well-shaped
// simplex, until it reaches rho_end.

#include <functional>
#include <span>
#include <vector>

namespace pubo {

struct OptimizerOptions {
  double rho_begin = 0.5;
  double rho_end = 1e-3;
  int max_evals = 500;
};

struct OptimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  /// Trust-region and geometry steps taken after the initial simplex.
  int iterations = 0;
  bool hit_eval_cap = false;
  /// Every evaluated point and its value, in evaluation order.
  std::vector<std::vector<double>> trace_points;
  std::vector<double> trace_values;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

OptimizeResult minimize_cobyla(const ObjectiveFn& f, std::vector<double> x0, const OptimizerOptions& opts = {});

}  // namespace pubo
