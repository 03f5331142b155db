#include "sbmest/likelihood.hpp"

#include <cmath>

#include "sbmest/errors.hpp"
#include "sbmest/optimize.hpp"

namespace sbmest {

namespace {

constexpr double kBoxMargin = 1e-6;

// One binomial term m log(rho b) + (np - m) log(1 - rho b) and the factor
// multiplying db/dparam in its derivative.
double binom_term(double m, double np, double rho, double b, double* dfactor) {
  const double pb = rho * b;
  if (dfactor) *dfactor = m / b - (np - m) * rho / (1.0 - pb);
  double v = 0.0;
  if (m > 0) v += m * std::log(pb);
  if (np - m > 0) v += (np - m) * std::log1p(-pb);
  return v;
}

void check_stats(const SufficientStats& stats, int K) {
  if (stats.K != K) throw Error("sufficient statistics have the wrong block count");
  for (int k = 0; k < K; ++k)
    for (int l = k; l < K; ++l)
      if (stats.n_pairs(k, l) <= 0)
        throw EmptyBlockPairError("no vertex pairs for a block pair");
}

}  // namespace

SufficientStats binomial_counts(const GraphSample& g, const std::vector<std::int32_t>& labels,
                                int K) {
  SufficientStats s;
  s.K = K;
  s.m = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < g.n; ++i)
    for (std::int64_t t = g.row_begin[i]; t < g.row_begin[i + 1]; ++t) {
      const int j = g.neighbors[t];
      if (j < i) continue;  // count each unordered pair once
      s.m(labels[i], labels[j]) += 1.0;
    }
  s.m = (s.m + s.m.transpose()).eval();
  s.m.diagonal() /= 2.0;

  std::vector<int> sizes(K, 0);
  for (int i = 0; i < g.n; ++i) ++sizes[labels[i]];
  s.n_pairs.resize(K, K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l)
      s.n_pairs(k, l) = k == l ? 0.5 * sizes[k] * (sizes[k] + 1.0)
                               : static_cast<double>(sizes[k]) * sizes[l];
  return s;
}

SufficientStats binomial_counts(const GraphSample& g, int K) {
  return binomial_counts(g, g.tau, K);
}

SufficientStats binomial_counts(const Eigen::MatrixXd& A, const std::vector<std::int32_t>& tau,
                                int K) {
  const int n = static_cast<int>(tau.size());
  SufficientStats s;
  s.K = K;
  s.m = Eigen::MatrixXd::Zero(K, K);
  std::vector<int> sizes(K, 0);
  for (int i = 0; i < n; ++i) ++sizes[tau[i]];
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (A(i, j) != 0.0) s.m(tau[i], tau[j]) += 1.0;
  s.m = (s.m + s.m.transpose()).eval();
  s.m.diagonal() /= 2.0;
  s.n_pairs.resize(K, K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l)
      s.n_pairs(k, l) = k == l ? 0.5 * sizes[k] * (sizes[k] + 1.0)
                               : static_cast<double>(sizes[k]) * sizes[l];
  return s;
}

SufficientStats population_counts(const ModelSpec& model, const std::vector<int>& sizes) {
  SufficientStats s;
  s.K = model.K;
  s.n_pairs.resize(model.K, model.K);
  s.m.resize(model.K, model.K);
  for (int k = 0; k < model.K; ++k)
    for (int l = 0; l < model.K; ++l) {
      s.n_pairs(k, l) = k == l ? 0.5 * sizes[k] * (sizes[k] + 1.0)
                               : static_cast<double>(sizes[k]) * sizes[l];
      s.m(k, l) = s.n_pairs(k, l) * model.rho * model.B(k, l);
    }
  return s;
}

Eigen::MatrixXd naive_mle(const SufficientStats& stats, double rho) {
  check_stats(stats, stats.K);
  Eigen::MatrixXd B(stats.K, stats.K);
  for (int k = 0; k < stats.K; ++k)
    for (int l = 0; l < stats.K; ++l) B(k, l) = stats.m(k, l) / (rho * stats.n_pairs(k, l));
  return 0.5 * (B + B.transpose());
}

double rank1_loglik_2block(const SufficientStats& stats, double rho, double p, double q,
                           Eigen::Vector2d* grad) {
  double d11, d12, d22;
  double v = binom_term(stats.m(0, 0), stats.n_pairs(0, 0), rho, p * p, &d11) +
             binom_term(stats.m(0, 1), stats.n_pairs(0, 1), rho, p * q, &d12) +
             binom_term(stats.m(1, 1), stats.n_pairs(1, 1), rho, q * q, &d22);
  if (grad) {
    (*grad)[0] = d11 * 2.0 * p + d12 * q;
    (*grad)[1] = d12 * p + d22 * 2.0 * q;
  }
  return v;
}

Eigen::Matrix3d rank2_3block_matrix(const Eigen::Matrix<double, 5, 1>& x) {
  const double r1 = x[0], r2 = x[1], r3 = x[2], th = x[3], ga = x[4];
  Eigen::Matrix3d B;
  B << r1 * r1, r1 * r2 * std::cos(th), r1 * r3 * std::cos(ga),
      r1 * r2 * std::cos(th), r2 * r2, r2 * r3 * std::cos(th - ga),
      r1 * r3 * std::cos(ga), r2 * r3 * std::cos(th - ga), r3 * r3;
  return B;
}

double rank2_loglik_3block(const SufficientStats& stats, double rho,
                           const Eigen::Matrix<double, 5, 1>& x,
                           Eigen::Matrix<double, 5, 1>* grad) {
  const double r1 = x[0], r2 = x[1], r3 = x[2], th = x[3], ga = x[4];
  const double ct = std::cos(th), st = std::sin(th);
  const double cg = std::cos(ga), sg = std::sin(ga);
  const double cd = std::cos(th - ga), sd = std::sin(th - ga);
  const Eigen::Matrix3d B = rank2_3block_matrix(x);

  // dB_kl / d(r1, r2, r3, th, ga)
  const double g[6][5] = {
      {2 * r1, 0, 0, 0, 0},                              // (0,0)
      {r2 * ct, r1 * ct, 0, -r1 * r2 * st, 0},           // (0,1)
      {r3 * cg, 0, r1 * cg, 0, -r1 * r3 * sg},           // (0,2)
      {0, 2 * r2, 0, 0, 0},                              // (1,1)
      {0, r3 * cd, r2 * cd, -r2 * r3 * sd, r2 * r3 * sd},// (1,2)
      {0, 0, 2 * r3, 0, 0}};                             // (2,2)
  const int kidx[6] = {0, 0, 0, 1, 1, 2};
  const int lidx[6] = {0, 1, 2, 1, 2, 2};

  double v = 0.0;
  if (grad) grad->setZero();
  for (int t = 0; t < 6; ++t) {
    const int k = kidx[t], l = lidx[t];
    double dfac;
    v += binom_term(stats.m(k, l), stats.n_pairs(k, l), rho, B(k, l), &dfac);
    if (grad)
      for (int a = 0; a < 5; ++a) (*grad)[a] += dfac * g[t][a];
  }
  return v;
}

namespace {

RankMleResult run_mle(const SufficientStats& stats, double rho, const Eigen::VectorXd& init,
                      const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                      const BoxObjective& obj, const FeasiblePred& feasible,
                      const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& rebuild) {
  (void)stats;
  (void)rho;
  BoxMaxResult r = maximize_box(obj, init, lo, hi, feasible);
  RankMleResult out;
  out.params = r.x;
  out.B_hat = rebuild(r.x);
  out.loglik = r.value;
  out.converged = r.converged;
  out.iterations = r.iterations;
  out.boundary_hit = r.boundary_hit;
  return out;
}

}  // namespace

RankMleResult rank1_mle_2block(const SufficientStats& stats, double rho,
                               const Eigen::Vector2d& init) {
  check_stats(stats, 2);
  if (init[0] <= 0 || init[0] >= 1 || init[1] <= 0 || init[1] >= 1)
    throw InfeasibleInitError("(p, q) init must lie in (0, 1)^2");

  Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, kBoxMargin);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 1.0 - kBoxMargin);
  auto obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    Eigen::Vector2d g2;
    const double v = rank1_loglik_2block(stats, rho, x[0], x[1], &g2);
    g = g2;
    return v;
  };
  auto rebuild = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd B(2, 2);
    B << x[0] * x[0], x[0] * x[1], x[0] * x[1], x[1] * x[1];
    return B;
  };
  return run_mle(stats, rho, init, lo, hi, obj, nullptr, rebuild);
}

RankMleResult rank2_mle_3block(const SufficientStats& stats, double rho,
                               const Eigen::Matrix<double, 5, 1>& init) {
  check_stats(stats, 3);
  const double half_pi = 1.5707963267948966;
  Eigen::VectorXd lo(5), hi(5);
  lo << kBoxMargin, kBoxMargin, kBoxMargin, kBoxMargin, kBoxMargin;
  hi << 1.0 - kBoxMargin, 1.0 - kBoxMargin, 1.0 - kBoxMargin, half_pi - kBoxMargin,
      half_pi - kBoxMargin;

  auto feasible = [&](const Eigen::VectorXd& x) {
    Eigen::Matrix<double, 5, 1> x5 = x;
    const Eigen::Matrix3d B = rank2_3block_matrix(x5);
    return B.minCoeff() > 0.0 && B.maxCoeff() < 1.0;
  };
  for (int i = 0; i < 5; ++i)
    if (init[i] < lo[i] || init[i] > hi[i])
      throw InfeasibleInitError("rank-2 init outside the parameter box");
  if (!feasible(init)) throw InfeasibleInitError("rank-2 init implies B outside (0, 1)");

  auto obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    Eigen::Matrix<double, 5, 1> x5 = x, g5;
    const double v = rank2_loglik_3block(stats, rho, x5, &g5);
    g = g5;
    return v;
  };
  auto rebuild = [](const Eigen::VectorXd& x) {
    Eigen::Matrix<double, 5, 1> x5 = x;
    return Eigen::MatrixXd(rank2_3block_matrix(x5));
  };
  return run_mle(stats, rho, init, lo, hi, obj, feasible, rebuild);
}

Eigen::Vector2d rank1_init_from_estimate(const Eigen::MatrixXd& B_hat) {
  auto root = [](double v) {
    return std::sqrt(std::min(std::max(v, 1e-4), 1.0 - 1e-4));
  };
  return {root(B_hat(0, 0)), root(B_hat(1, 1))};
}

Eigen::Matrix<double, 5, 1> rank2_init_from_estimate(const Eigen::MatrixXd& B_hat) {
  auto clip01 = [](double v) { return std::min(std::max(v, 1e-4), 1.0 - 1e-4); };
  const double r1 = std::sqrt(clip01(B_hat(0, 0)));
  const double r2 = std::sqrt(clip01(B_hat(1, 1)));
  const double r3 = std::sqrt(clip01(B_hat(2, 2)));
  auto angle = [&](double b, double ri, double rj) {
    const double c = std::min(std::max(b / (ri * rj), 1e-3), 1.0 - 1e-3);
    return std::acos(c);
  };
  Eigen::Matrix<double, 5, 1> x;
  x << r1, r2, r3, angle(B_hat(0, 1), r1, r2), angle(B_hat(0, 2), r1, r3);
  const double half_pi = 1.5707963267948966;
  for (int i = 3; i < 5; ++i) x[i] = std::min(std::max(x[i], 1e-4), half_pi - 1e-4);
  return x;
}

}  // namespace sbmest
