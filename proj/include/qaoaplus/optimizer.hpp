#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qaoaplus/ansatz.hpp"
#include "qaoaplus/graph.hpp"

namespace qaoaplus {

using ObjectiveFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;
// Returns f(x) and writes the gradient into the second argument.
using ValueGradientFn = std::function<double(std::span<const double>, std::span<double>)>;

struct BfgsOptions {
  double grad_tol = 1e-6;  // stop when the max-norm of the gradient falls below
  int max_iter = 500;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
};

struct BfgsResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  // A non-finite objective or gradient value was encountered.
  bool failed = false;
};

// Quasi-Newton minimization with the inverse-Hessian BFGS update and a
// strong-Wolfe line search. Returns the last (and lowest) iterate.
BfgsResult bfgs_minimize(const ValueGradientFn& fg, std::vector<double> x0,
                         const BfgsOptions& options = {});
BfgsResult bfgs_minimize(const ObjectiveFn& f, const GradientFn& grad, std::vector<double> x0,
                         const BfgsOptions& options = {});

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> finite_difference_gradient(const ObjectiveFn& f,
                                               std::span<const double> x, double h = 1e-6);

// <C> / cmax, clamped to [0, 1]. Throws InputError for cmax < 1 and
// NumericalError when expectation lies outside [-1e-9, cmax + 1e-9].
double approximation_ratio(double expectation, int cmax);

enum class GradientMethod { adjoint, finite_difference };

struct MultistartOptions {
  int restarts = 10;
  std::uint64_t seed = 0;
  // Restart 0 starts from `warm_params` (all zeros when unset) instead of a
  // random point.
  bool warm_start = true;
  std::optional<std::vector<double>> warm_params;
  GradientMethod gradient = GradientMethod::adjoint;
  double fd_step = 1e-6;
  BfgsOptions bfgs;
  unsigned threads = 1;
};

struct RestartRecord {
  std::uint64_t seed = 0;
  double final_value = 0.0;  // <C> reached by this restart
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  bool warm = false;
};

struct OptResult {
  std::vector<double> best_params;
  double best_expectation = 0.0;
  double approximation_ratio = 0.0;
  int cmax = 0;
  std::vector<RestartRecord> restarts;
  std::string graph_id;
  std::string ansatz;
};

// Maximizes <C> from `restarts` starting points. Restart i uses seed
// (options.seed XOR i); random starts are uniform in [0, 2pi) per coordinate.
// Throws OptimizationError when every restart fails.
OptResult multistart_optimize(const CircuitEvaluator& evaluator, int cmax,
                              const MultistartOptions& options = {});
OptResult multistart_optimize(const AnsatzSpec& spec, const Graph& g,
                              const MultistartOptions& options = {});

nlohmann::json opt_result_to_json(const OptResult& r);

}  // namespace qaoaplus
