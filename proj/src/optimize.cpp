#include "sbmest/optimize.hpp"

#include <cmath>

namespace sbmest {

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd x, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Gradient with coordinates pointing out of the box at an active bound zeroed.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= lo[i] && g[i] < 0) pg[i] = 0;
    if (x[i] >= hi[i] && g[i] > 0) pg[i] = 0;
  }
  return pg;
}

}  // namespace

BoxMaxResult maximize_box(const BoxObjective& f, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          const FeasiblePred& feasible, const BoxMaxOptions& opts) {
  const Eigen::Index n = x0.size();
  BoxMaxResult res;
  res.x = clamp_to_box(x0, lo, hi);

  Eigen::VectorXd g(n);
  double fx = f(res.x, g);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);  // inverse Hessian approx (ascent)
  const double g0_scale = std::max(1.0, g.cwiseAbs().maxCoeff());

  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd pg = projected_gradient(res.x, g, lo, hi);
    if (pg.cwiseAbs().maxCoeff() <= opts.grad_tol * g0_scale) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd dir = H * g;
    if (dir.dot(g) <= 0) dir = g;  // fall back to steepest ascent

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new, g_new;
    double f_new = fx;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = clamp_to_box(res.x + step * dir, lo, hi);
      if ((x_new - res.x).cwiseAbs().maxCoeff() == 0.0) break;
      if (!feasible || feasible(x_new)) {
        g_new.resize(n);
        f_new = f(x_new, g_new);
        const double gain = g.dot(x_new - res.x);
        if (std::isfinite(f_new) && f_new >= fx + 1e-4 * gain - 1e-15 * std::abs(fx)) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;

    // BFGS update on the inverse Hessian (ascent convention)
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g - g_new;  // = -(grad_new - grad) for ascent
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      const Eigen::MatrixXd V = I - (y * s.transpose()) / sy;
      H = V.transpose() * H * V + (s * s.transpose()) / sy;
    }

    const double move = s.cwiseAbs().maxCoeff();
    const double dfx = f_new - fx;
    res.x = x_new;
    fx = f_new;
    g = g_new;
    if (move <= opts.step_tol * (1.0 + res.x.cwiseAbs().maxCoeff()) &&
        std::abs(dfx) <= 1e-14 * (1.0 + std::abs(fx))) {
      const Eigen::VectorXd pg2 = projected_gradient(res.x, g, lo, hi);
      res.converged = pg2.cwiseAbs().maxCoeff() <= 1e-6 * g0_scale;
      ++it;
      break;
    }
  }

  res.value = fx;
  res.iterations = it;
  for (Eigen::Index i = 0; i < n; ++i)
    if (res.x[i] <= lo[i] + 1e-12 || res.x[i] >= hi[i] - 1e-12) res.boundary_hit = true;
  if (!res.converged) {
    const Eigen::VectorXd pg = projected_gradient(res.x, g, lo, hi);
    res.converged = pg.cwiseAbs().maxCoeff() <= opts.grad_tol * g0_scale ||
                    (res.boundary_hit && pg.cwiseAbs().maxCoeff() <= 1e-6 * g0_scale);
  }
  return res;
}

}  // namespace sbmest
