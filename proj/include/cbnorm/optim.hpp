#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "cbnorm/random.hpp"
#include "cbnorm/types.hpp"

namespace cbnorm {

struct OptimSettings {
  int restarts = 20;
  int max_iters = 2000;
  double grad_tol = 1e-9;
  std::uint64_t seed = 1;
  double fd_step = 1e-6;
  double init_step = 0.1;
};

using Objective = std::function<double(const RealVector&)>;
using ObjectiveGradient = std::function<RealVector(const RealVector&)>;
// restart index and a per-restart stream; restart 0 should return the
// caller's deterministic seed point.
using Initializer = std::function<RealVector(int, std::mt19937_64&)>;

struct OptimOutcome {
  RealVector x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;     // summed over restarts
  int restarts_used = 0;
  bool converged = false;  // gradient tolerance met on the best restart
  double spread = 0.0;     // max - min over restart end values
};

inline RealVector fd_gradient(const Objective& f, const RealVector& x, double h) {
  RealVector g(x.size());
  RealVector e = x;
  for (long i = 0; i < x.size(); ++i) {
    const double xi = e(i);
    e(i) = xi + h;
    const double fp = f(e);
    e(i) = xi - h;
    const double fm = f(e);
    e(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace detail {

struct DescentResult {
  RealVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Armijo backtracking along the normalized negative gradient. Monotone by
// construction; every accepted value lands in history when one is supplied.
inline DescentResult armijo_descent(const Objective& f, const ObjectiveGradient* grad,
                                    RealVector x, const OptimSettings& st,
                                    std::vector<double>* history) {
  DescentResult out;
  double fx = f(x);
  if (history) history->push_back(fx);
  double step = st.init_step;
  for (int it = 0; it < st.max_iters; ++it) {
    const RealVector g = grad ? (*grad)(x) : fd_gradient(f, x, st.fd_step);
    const double gnorm = g.norm();
    if (g.lpNorm<Eigen::Infinity>() <= st.grad_tol) {
      out.converged = true;
      break;
    }
    const RealVector dir = -g / gnorm;
    double s = std::min(step * 2.0, 1e3);
    bool accepted = false;
    while (s > 1e-14) {
      const RealVector xt = x + s * dir;
      const double ft = f(xt);
      if (ft <= fx - 1e-4 * s * gnorm) {
        x = xt;
        fx = ft;
        step = s;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    ++out.iterations;
    if (!accepted) break;  // no descent along the gradient at resolvable steps
    if (history) history->push_back(fx);
  }
  out.x = std::move(x);
  out.value = fx;
  return out;
}

}  // namespace detail

// Multistart minimization. Restart r draws its start from init(r, rng_r)
// where rng_r is seeded with settings.seed + r, making every run a pure
// function of the settings.
inline OptimOutcome minimize_multistart(const Objective& f, const ObjectiveGradient* grad,
                                        const Initializer& init, const OptimSettings& st,
                                        std::vector<std::vector<double>>* histories = nullptr) {
  OptimOutcome best;
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(st.restarts, 1); ++r) {
    auto rng = seeded_rng(st.seed + static_cast<std::uint64_t>(r));
    RealVector x0 = init(r, rng);
    std::vector<double> hist;
    detail::DescentResult res =
        detail::armijo_descent(f, grad, std::move(x0), st, histories ? &hist : nullptr);
    if (histories) histories->push_back(std::move(hist));
    best.iterations += res.iterations;
    ++best.restarts_used;
    vmin = std::min(vmin, res.value);
    vmax = std::max(vmax, res.value);
    if (res.value < best.value) {
      best.value = res.value;
      best.x = res.x;
      best.converged = res.converged;
    }
  }
  best.spread = vmax - vmin;
  return best;
}

}  // namespace cbnorm
