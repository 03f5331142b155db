#include <cmath>
#include <limits>

#include "sbmest/errors.hpp"
#include "sbmest/rng.hpp"
#include "sbmest/spectral.hpp"

namespace sbmest {

namespace {

constexpr int kMaxLloyd = 300;
constexpr double kInertiaRelTol = 1e-8;

double sq_dist(const Eigen::MatrixXd& X, int i, const Eigen::MatrixXd& C, int k) {
  return (X.row(i) - C.row(k)).squaredNorm();
}

// kmeans++ seeding: first center uniform, then proportional to squared
// distance from the nearest chosen center.
Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& X, int K, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd C(K, X.cols());
  C.row(0) = X.row(static_cast<int>(rng.next_index(n)));
  Eigen::VectorXd d2(n);
  for (int i = 0; i < n; ++i) d2[i] = sq_dist(X, i, C, 0);
  for (int k = 1; k < K; ++k) {
    const double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.next_index(n));
    } else {
      double target = rng.next_double() * total;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        target -= d2[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
    }
    C.row(k) = X.row(pick);
    for (int i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(X, i, C, k));
  }
  return C;
}

struct LloydOutcome {
  std::vector<std::int32_t> labels;
  Eigen::MatrixXd centers;
  std::vector<int> sizes;
  double inertia = 0.0;
  bool repaired = false;
};

LloydOutcome lloyd(const Eigen::MatrixXd& X, int K, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  LloydOutcome out;
  out.centers = seed_centers(X, K, rng);
  out.labels.assign(n, 0);
  out.sizes.assign(K, 0);

  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxLloyd; ++iter) {
    double inertia = 0.0;
    std::fill(out.sizes.begin(), out.sizes.end(), 0);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(X, i, out.centers, 0);
      for (int k = 1; k < K; ++k) {
        const double d = sq_dist(X, i, out.centers, k);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      out.labels[i] = best;
      ++out.sizes[best];
      inertia += bd;
    }

    Eigen::MatrixXd fresh = Eigen::MatrixXd::Zero(K, X.cols());
    for (int i = 0; i < n; ++i) fresh.row(out.labels[i]) += X.row(i);
    for (int k = 0; k < K; ++k) {
      if (out.sizes[k] > 0) {
        fresh.row(k) /= static_cast<double>(out.sizes[k]);
      } else {
        // re-seed the dead center at the point farthest from its own center
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = sq_dist(X, i, out.centers, out.labels[i]);
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        fresh.row(k) = X.row(far);
        out.repaired = true;
      }
    }
    out.centers = fresh;

    if (std::abs(prev_inertia - inertia) <= kInertiaRelTol * std::max(prev_inertia, 1e-300)) {
      out.inertia = inertia;
      break;
    }
    prev_inertia = inertia;
    out.inertia = inertia;
  }

  // final labels against the settled centers
  out.inertia = 0.0;
  std::fill(out.sizes.begin(), out.sizes.end(), 0);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = sq_dist(X, i, out.centers, 0);
    for (int k = 1; k < K; ++k) {
      const double d = sq_dist(X, i, out.centers, k);
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    out.labels[i] = best;
    ++out.sizes[best];
    out.inertia += bd;
  }
  return out;
}

}  // namespace

ClusterResult cluster_embedding(const Embedding& emb, int K, std::uint64_t seed, int restarts) {
  if (K < 1) throw OutOfRangeError("K must be at least 1");
  const int n = static_cast<int>(emb.U.rows());
  if (K > n) throw OutOfRangeError("more clusters than points");

  Rng rng(derive_seed(seed, 0x6b6d65616e73ULL));
  LloydOutcome best;
  bool have = false;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    LloydOutcome cur = lloyd(emb.U, K, rng);
    if (!have || cur.inertia < best.inertia) {
      best = std::move(cur);
      have = true;
    }
  }

  ClusterResult res;
  res.labels = std::move(best.labels);
  res.centers = std::move(best.centers);
  res.sizes = std::move(best.sizes);
  res.inertia = best.inertia;
  res.empty_cluster_repaired = best.repaired;
  return res;
}

}  // namespace sbmest
