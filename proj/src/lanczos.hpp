#ifndef SBMEST_SRC_LANCZOS_HPP
#define SBMEST_SRC_LANCZOS_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sbmest/spectral.hpp"

namespace sbmest::detail {

/// Ritz spectrum of a symmetric operator after m Lanczos steps with full
/// reorthogonalization. Deterministic: fixed start vectors, fixed restart
/// policy on breakdown (restarts keep extending the same orthonormal basis,
/// so repeated eigenvalues are found incrementally).
struct LanczosSpectrum {
  Eigen::VectorXd theta;     // Ritz values
  Eigen::VectorXd resid;     // residual bounds ||A y - theta y|| <= resid
  Eigen::MatrixXd basis;     // n x m orthonormal
  Eigen::MatrixXd tri_vecs;  // m x m eigenvectors of the (block) tridiagonal
  double scale = 0.0;        // max Ritz modulus, a spectral-norm proxy

  Eigen::VectorXd ritz_vector(int j) const { return basis * tri_vecs.col(j); }
};

/// Runs until `done(spectrum)` returns true (checked periodically), the basis
/// spans R^n, or max_steps is reached.
LanczosSpectrum lanczos_spectrum(const SymOp& A,
                                 const std::function<bool(const LanczosSpectrum&)>& done,
                                 int max_steps = 250);

}  // namespace sbmest::detail

#endif
