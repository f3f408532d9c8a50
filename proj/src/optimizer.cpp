#include "qaoaplus/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qaoaplus/error.hpp"
#include "qaoaplus/parallel.hpp"
#include "qaoaplus/random.hpp"

namespace qaoaplus {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct Point {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative along the search direction
  Vec x;
  Vec g;
};

class LineSearch {
 public:
  LineSearch(const ValueGradientFn& fg, const Vec& x, const Vec& dir, const BfgsOptions& opt)
      : fg_(fg), x_(x), dir_(dir), opt_(opt) {}

  // Strong-Wolfe step (bracketing then zoom). Returns nullopt when no
  // acceptable step exists within the iteration caps; sets `non_finite`
  // when the objective produced NaN or inf.
  std::optional<Point> search(const Point& start, double alpha0) {
    start_ = start;
    start_.alpha = 0.0;
    Point prev = start_;
    double alpha = alpha0;
    for (int i = 0; i < kMaxBracket; ++i) {
      Point cur = probe(alpha);
      if (non_finite) return std::nullopt;
      if (cur.f > start_.f + opt_.c1 * alpha * start_.slope || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * start_.slope) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return std::nullopt;
  }

  bool non_finite = false;

 private:
  static constexpr int kMaxBracket = 40;
  static constexpr int kMaxZoom = 60;

  Point probe(double alpha) {
    Point p;
    p.alpha = alpha;
    p.x.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) p.x[i] = x_[i] + alpha * dir_[i];
    p.g.resize(x_.size());
    p.f = fg_(p.x, p.g);
    if (!std::isfinite(p.f) || !all_finite(p.g)) non_finite = true;
    p.slope = dot(p.g, dir_);
    return p;
  }

  std::optional<Point> zoom(Point lo, Point hi) {
    for (int i = 0; i < kMaxZoom; ++i) {
      const double width = hi.alpha - lo.alpha;
      if (std::abs(width) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      // Minimizer of the quadratic through f(lo), f'(lo), f(hi), kept inside
      // the central 80% of the bracket.
      const double denom = 2.0 * (hi.f - lo.f - lo.slope * width);
      double alpha = lo.alpha + width / 2.0;
      if (denom > 0.0) alpha = lo.alpha - lo.slope * width * width / denom;
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      alpha = std::clamp(alpha, a + 0.1 * (b - a), b - 0.1 * (b - a));

      Point cur = probe(alpha);
      if (non_finite) return std::nullopt;
      if (cur.f > start_.f + opt_.c1 * alpha * start_.slope || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * start_.slope) return cur;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    // Bracket collapsed. Accept the best point found if it still decreases f.
    if (lo.alpha != 0.0 && lo.f < start_.f) return lo;
    return std::nullopt;
  }

  const ValueGradientFn& fg_;
  const Vec& x_;
  const Vec& dir_;
  const BfgsOptions& opt_;
  Point start_;
};

}  // namespace

BfgsResult bfgs_minimize(const ValueGradientFn& fg, std::vector<double> x0,
                         const BfgsOptions& options) {
  const std::size_t n = x0.size();
  BfgsResult result;
  Point cur;
  cur.x = std::move(x0);
  cur.g.resize(n);
  cur.f = fg(cur.x, cur.g);
  if (!std::isfinite(cur.f) || !all_finite(cur.g)) {
    result.x = std::move(cur.x);
    result.f = cur.f;
    result.failed = true;
    return result;
  }

  // Inverse Hessian approximation, row-major.
  Vec h(n * n, 0.0);
  auto reset_identity = [&] {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  };
  reset_identity();
  bool fresh = true;

  Vec dir(n), hy(n), s(n), y(n);
  int iter = 0;
  while (iter < options.max_iter) {
    if (max_abs(cur.g) < options.grad_tol) {
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc -= h[i * n + j] * cur.g[j];
      dir[i] = acc;
    }
    cur.slope = dot(cur.g, dir);
    if (cur.slope >= 0.0) {
      // Not a descent direction; fall back to steepest descent.
      reset_identity();
      fresh = true;
      for (std::size_t i = 0; i < n; ++i) dir[i] = -cur.g[i];
      cur.slope = dot(cur.g, dir);
    }
    // Unit quasi-Newton step, except on a fresh identity where the step is
    // capped to length 1 in max-norm.
    const double alpha0 = fresh ? std::min(1.0, 1.0 / max_abs(dir)) : 1.0;

    LineSearch ls(fg, cur.x, dir, options);
    auto next = ls.search(cur, alpha0);
    if (ls.non_finite) {
      result.failed = true;
      break;
    }
    ++iter;
    if (!next) {
      if (fresh) break;
      reset_identity();
      fresh = true;
      continue;
    }

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = next->x[i] - cur.x[i];
      y[i] = next->g[i] - cur.g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-14 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (fresh) {
        // Scale the initial identity to the observed curvature.
        const double scale = sy / dot(y, y);
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = scale;
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += h[i * n + j] * y[j];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      const double coef = rho * rho * yhy + rho;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
      }
      fresh = false;
    }
    cur = std::move(*next);
  }
  if (!result.converged && !result.failed && max_abs(cur.g) < options.grad_tol) {
    result.converged = true;
  }
  result.x = std::move(cur.x);
  result.f = cur.f;
  result.iterations = iter;
  return result;
}

BfgsResult bfgs_minimize(const ObjectiveFn& f, const GradientFn& grad, std::vector<double> x0,
                         const BfgsOptions& options) {
  ValueGradientFn fg = [&](std::span<const double> x, std::span<double> g) {
    grad(x, g);
    return f(x);
  };
  return bfgs_minimize(fg, std::move(x0), options);
}

std::vector<double> finite_difference_gradient(const ObjectiveFn& f,
                                               std::span<const double> x, double h) {
  if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
  Vec probe(x.begin(), x.end());
  Vec grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double approximation_ratio(double expectation, int cmax) {
  if (cmax < 1) throw InputError("cmax must be at least 1");
  constexpr double kSlack = 1e-9;
  if (!(expectation >= -kSlack && expectation <= cmax + kSlack)) {
    throw NumericalError("expectation " + std::to_string(expectation) +
                         " outside [0, cmax=" + std::to_string(cmax) + "]");
  }
  return std::clamp(expectation / cmax, 0.0, 1.0);
}

OptResult multistart_optimize(const CircuitEvaluator& evaluator, int cmax,
                              const MultistartOptions& options) {
  if (options.restarts < 1) throw InputError("restarts must be at least 1");
  const int k = evaluator.param_count();
  if (options.warm_params && options.warm_params->size() != static_cast<std::size_t>(k)) {
    throw InputError("warm-start vector has the wrong length");
  }

  // Minimize -<C>.
  ValueGradientFn fg;
  if (options.gradient == GradientMethod::adjoint) {
    fg = [&](std::span<const double> x, std::span<double> g) {
      const double v = evaluator.expectation_and_gradient(x, g);
      for (double& gi : g) gi = -gi;
      return -v;
    };
  } else {
    fg = [&](std::span<const double> x, std::span<double> g) {
      const ObjectiveFn neg = [&](std::span<const double> p) {
        return -evaluator.expectation(p);
      };
      const auto fd = finite_difference_gradient(neg, x, options.fd_step);
      std::copy(fd.begin(), fd.end(), g.begin());
      return neg(x);
    };
  }

  const auto n_restarts = static_cast<std::size_t>(options.restarts);
  std::vector<BfgsResult> runs(n_restarts);
  std::vector<RestartRecord> records(n_restarts);
  parallel_for(n_restarts, options.threads, [&](std::size_t i) {
    RestartRecord& rec = records[i];
    rec.seed = options.seed ^ static_cast<std::uint64_t>(i);
    Vec x0(k, 0.0);
    if (i == 0 && options.warm_start) {
      rec.warm = true;
      if (options.warm_params) x0 = *options.warm_params;
    } else {
      Rng rng(rec.seed);
      for (double& v : x0) v = 2.0 * std::numbers::pi * uniform01(rng);
    }
    runs[i] = bfgs_minimize(fg, std::move(x0), options.bfgs);
    rec.final_value = -runs[i].f;
    rec.iterations = runs[i].iterations;
    rec.converged = runs[i].converged;
    rec.failed = runs[i].failed;
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n_restarts; ++i) {
    if (records[i].failed) continue;
    if (!best || records[i].final_value > records[*best].final_value) best = i;
  }
  if (!best) throw OptimizationError("all " + std::to_string(n_restarts) + " restarts failed");

  OptResult out;
  out.best_params = std::move(runs[*best].x);
  out.best_expectation = records[*best].final_value;
  out.approximation_ratio = approximation_ratio(out.best_expectation, cmax);
  out.cmax = cmax;
  out.restarts = std::move(records);
  out.graph_id = evaluator.spec().graph_id;
  out.ansatz = evaluator.spec().descriptor();
  return out;
}

OptResult multistart_optimize(const AnsatzSpec& spec, const Graph& g,
                              const MultistartOptions& options) {
  const CircuitEvaluator evaluator(spec, g);
  return multistart_optimize(evaluator, max_cut_bruteforce(g).cmax, options);
}

nlohmann::json opt_result_to_json(const OptResult& r) {
  nlohmann::json restarts = nlohmann::json::array();
  for (const auto& rec : r.restarts) {
    restarts.push_back({{"seed", rec.seed},
                        {"final_value", rec.final_value},
                        {"iterations", rec.iterations},
                        {"converged", rec.converged},
                        {"failed", rec.failed},
                        {"warm", rec.warm}});
  }
  return {{"graph_id", r.graph_id},
          {"ansatz", r.ansatz},
          {"best_params", r.best_params},
          {"best_expectation", r.best_expectation},
          {"approximation_ratio", r.approximation_ratio},
          {"cmax", r.cmax},
          {"restarts", std::move(restarts)}};
}

}  // namespace qaoaplus
