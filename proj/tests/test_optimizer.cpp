#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qaoaplus/error.hpp"
#include "qaoaplus/optimizer.hpp"

using namespace qaoaplus;
using std::numbers::pi;

namespace {

double rosenbrock(std::span<const double> x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

void rosenbrock_grad(std::span<const double> x, std::span<double> g) {
  g[0] = -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]);
  g[1] = 200.0 * (x[1] - x[0] * x[0]);
}

}  // namespace

TEST_CASE("bfgs_minimize on textbook functions") {
  SUBCASE("1-D quadratic") {
    const auto r = bfgs_minimize([](std::span<const double> x) { return (x[0] - 3) * (x[0] - 3); },
                                 [](std::span<const double> x, std::span<double> g) {
                                   g[0] = 2 * (x[0] - 3);
                                 },
                                 {0.0});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 3.0) < 1e-6);
  }
  SUBCASE("Rosenbrock") {
    const auto r = bfgs_minimize(rosenbrock, rosenbrock_grad, {-1.2, 1.0});
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-5);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-5);
    CHECK(r.f <= rosenbrock(std::vector<double>{-1.2, 1.0}));
  }
  SUBCASE("constant function converges at the start") {
    const auto r = bfgs_minimize([](std::span<const double>) { return 4.5; },
                                 [](std::span<const double>, std::span<double> g) {
                                   std::fill(g.begin(), g.end(), 0.0);
                                 },
                                 {0.3, -1.0});
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.f == 4.5);
    CHECK(r.x == std::vector<double>{0.3, -1.0});
  }
  SUBCASE("non-finite objective marks the run failed") {
    const auto r = bfgs_minimize([](std::span<const double> x) { return std::log(x[0]); },
                                 [](std::span<const double> x, std::span<double> g) {
                                   g[0] = 1.0 / x[0];
                                 },
                                 {1.0});
    CHECK(r.failed);
  }
}

TEST_CASE("bfgs never ends above its start") {
  Rng rng(5);
  const Graph g = sample_regular_graph(8, 3, rng);
  const CircuitEvaluator ev(build_qaoa_plus(g, 3, 3), g);
  const ValueGradientFn fg = [&](std::span<const double> x, std::span<double> grad) {
    const double v = ev.expectation_and_gradient(x, grad);
    for (double& d : grad) d = -d;
    return -v;
  };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x0(ev.param_count());
    for (double& v : x0) v = 2 * pi * uniform01(rng);
    const double start = -ev.expectation(x0);
    const auto r = bfgs_minimize(fg, x0);
    CHECK(r.f <= start);
    CHECK_FALSE(r.failed);
  }
}

TEST_CASE("finite_difference_gradient") {
  const auto g = finite_difference_gradient(
      [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; },
      std::vector<double>{1.0, 2.0});
  CHECK(std::abs(g[0] - 2.0) < 1e-6);
  CHECK(std::abs(g[1] - 4.0) < 1e-6);

  const auto z = finite_difference_gradient([](std::span<const double>) { return 1.0; },
                                            std::vector<double>{0.5, 0.5, 0.5});
  CHECK(z == std::vector<double>{0.0, 0.0, 0.0});

  const Graph k2(2, {{0, 1}});
  const CircuitEvaluator ev(build_standard_qaoa(k2, 1), k2);
  const auto at_opt = finite_difference_gradient(
      [&](std::span<const double> x) { return ev.expectation(x); },
      std::vector<double>{pi / 2, pi / 8});
  CHECK(std::abs(at_opt[0]) < 1e-4);
  CHECK(std::abs(at_opt[1]) < 1e-4);

  CHECK_THROWS_AS(finite_difference_gradient([](std::span<const double>) { return 0.0; },
                                             std::vector<double>{1.0}, 0.0),
                  InputError);
}

TEST_CASE("central differences agree with an independent forward-difference estimate") {
  Rng rng(9);
  const Graph g = sample_regular_graph(6, 3, rng);
  const CircuitEvaluator ev(build_ma_qaoa(g, 5, 4), g);
  const ObjectiveFn f = [&](std::span<const double> x) { return ev.expectation(x); };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(ev.param_count());
    for (double& v : x) v = 2 * pi * uniform01(rng);
    const auto central = finite_difference_gradient(f, x, 1e-6);
    const double h = 1e-7;
    const double f0 = f(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto xp = x;
      xp[i] += h;
      const double forward = (f(xp) - f0) / h;
      // Forward differences carry O(h) truncation error with constants bounded
      // by the second derivative (at most a few times |E|^2 here).
      CHECK(std::abs(central[i] - forward) < 1e-4);
    }
  }
}

TEST_CASE("approximation_ratio") {
  CHECK(approximation_ratio(1.0, 1) == 1.0);
  CHECK(approximation_ratio(2.0, 4) == 0.5);
  CHECK(approximation_ratio(0.0, 7) == 0.0);
  CHECK(approximation_ratio(4.0 + 5e-10, 4) == 1.0);
  CHECK(approximation_ratio(-5e-10, 4) == 0.0);
  CHECK_THROWS_AS(approximation_ratio(4.1, 4), NumericalError);
  CHECK_THROWS_AS(approximation_ratio(-0.1, 4), NumericalError);
  CHECK_THROWS_AS(approximation_ratio(0.5, 0), InputError);
}

TEST_CASE("multistart_optimize") {
  SUBCASE("single edge reaches the exact optimum") {
    const Graph k2(2, {{0, 1}});
    MultistartOptions opt;
    opt.seed = 42;
    const auto r = multistart_optimize(build_standard_qaoa(k2, 1), k2, opt);
    CHECK(std::abs(r.approximation_ratio - 1.0) < 1e-6);
    CHECK(r.restarts.size() == 10);
    CHECK(r.restarts[0].warm);
    CHECK(r.cmax == 1);
  }

  Rng rng(77);
  const Graph g = sample_regular_graph(8, 3, rng);
  const int cmax = max_cut_bruteforce(g).cmax;
  MultistartOptions opt;
  opt.seed = 1234;

  SUBCASE("best is the max over restarts and beats the uniform floor") {
    const auto r = multistart_optimize(build_standard_qaoa(g, 1), g, opt);
    double best = -1.0;
    for (const auto& rec : r.restarts) best = std::max(best, rec.final_value);
    CHECK(r.best_expectation == best);
    CHECK(r.approximation_ratio == doctest::Approx(r.best_expectation / cmax));
    CHECK(r.approximation_ratio >= (g.num_edges() / 2.0) / cmax - 1e-12);
    for (std::size_t i = 0; i < r.restarts.size(); ++i)
      CHECK(r.restarts[i].seed == (opt.seed ^ i));
  }

  SUBCASE("QAOA+ warm-started from the p=1 optimum never loses to p=1") {
    const auto p1 = multistart_optimize(build_standard_qaoa(g, 1), g, opt);
    const auto spec = build_qaoa_plus(g, 1, 1);
    auto warm = opt;
    warm.warm_params = embed_p1_parameters(spec, p1.best_params[0], p1.best_params[1]);
    const auto plus = multistart_optimize(spec, g, warm);
    CHECK(plus.approximation_ratio >= p1.approximation_ratio - 1e-9);
  }

  SUBCASE("reproducible for a fixed seed at any thread count") {
    const auto spec = build_ma_qaoa(g, 4, 3);
    const auto a = multistart_optimize(spec, g, opt);
    auto threaded = opt;
    threaded.threads = 4;
    const auto b = multistart_optimize(spec, g, threaded);
    CHECK(a.best_params == b.best_params);
    CHECK(a.best_expectation == b.best_expectation);
    for (std::size_t i = 0; i < a.restarts.size(); ++i)
      CHECK(a.restarts[i].final_value == b.restarts[i].final_value);
  }

  SUBCASE("finite-difference gradients reach the same p=1 optimum") {
    auto fd = opt;
    fd.gradient = GradientMethod::finite_difference;
    const auto a = multistart_optimize(build_standard_qaoa(g, 1), g, opt);
    const auto b = multistart_optimize(build_standard_qaoa(g, 1), g, fd);
    CHECK(std::abs(a.best_expectation - b.best_expectation) < 1e-8);
  }

  SUBCASE("input validation") {
    auto bad = opt;
    bad.restarts = 0;
    CHECK_THROWS_AS(multistart_optimize(build_standard_qaoa(g, 1), g, bad), InputError);
    bad = opt;
    bad.warm_params = std::vector<double>{0.0};
    CHECK_THROWS_AS(multistart_optimize(build_standard_qaoa(g, 1), g, bad), InputError);
  }
}

TEST_CASE("finer groupings warm-started from a coarser optimum do at least as well") {
  Rng rng(81);
  const Graph g = sample_regular_graph(8, 3, rng);
  const int cmax = max_cut_bruteforce(g).cmax;
  MultistartOptions opt;
  opt.seed = 5;
  opt.restarts = 4;
  // ma-QAOA(2, 2) groups are unions of ma-QAOA(4, 4) groups (contiguous
  // balanced halves split into quarters).
  const auto coarse_spec = build_ma_qaoa(g, 2, 2);
  const auto fine_spec = build_ma_qaoa(g, 4, 4);
  const CircuitEvaluator coarse_ev(coarse_spec, g);
  const auto coarse = multistart_optimize(coarse_ev, cmax, opt);

  const auto& cp = coarse.best_params;
  std::vector<double> expanded{cp[0], cp[0], cp[1], cp[1], cp[2], cp[2], cp[3], cp[3]};
  const CircuitEvaluator fine_ev(fine_spec, g);
  CHECK(fine_ev.expectation(expanded) ==
        doctest::Approx(coarse.best_expectation).epsilon(1e-12));
  auto warm = opt;
  warm.warm_params = expanded;
  const auto fine = multistart_optimize(fine_ev, cmax, warm);
  CHECK(fine.best_expectation >= coarse.best_expectation - 1e-12);
}
