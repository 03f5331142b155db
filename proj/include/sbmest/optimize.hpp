#ifndef SBMEST_OPTIMIZE_HPP
#define SBMEST_OPTIMIZE_HPP

#include <functional>

#include <Eigen/Dense>

namespace sbmest {

/// Result of a box-constrained maximization.
struct BoxMaxResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  bool boundary_hit = false;
};

/// Objective: returns f(x) and fills grad. Points outside the feasible set
/// may additionally be rejected by `feasible`.
using BoxObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using FeasiblePred = std::function<bool(const Eigen::VectorXd&)>;

struct BoxMaxOptions {
  int max_iterations = 500;
  double grad_tol = 1e-10;   // sup-norm of the projected gradient, relative
  double step_tol = 1e-14;   // relative parameter change
  int max_backtracks = 60;
};

/// Projected BFGS ascent with Armijo backtracking. The iterate stays inside
/// [lo, hi] and, when given, the feasible region; the attained value is
/// non-decreasing across accepted steps.
BoxMaxResult maximize_box(const BoxObjective& f, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          const FeasiblePred& feasible = nullptr,
                          const BoxMaxOptions& opts = {});

}  // namespace sbmest

#endif
