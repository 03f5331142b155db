#include "sbmest/asymptotic.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace sbmest {

namespace {

constexpr double kConditionGate = 1e12;

struct Core {
  Eigen::MatrixXd Delta;
  Eigen::MatrixXd zeta;  // nu_k^T Delta^{-1} nu_l
  Eigen::MatrixXd xi;    // nu_k^T Delta^{-1} I_pq Delta^{-1} nu_l
  double cond = 0.0;
};

Core build_core(const Eigen::VectorXd& pi, const Eigen::MatrixXd& nu,
                const Eigen::VectorXd& signature) {
  const int K = static_cast<int>(nu.rows());
  const int d = static_cast<int>(nu.cols());
  Core c;
  c.Delta = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < K; ++k)
    c.Delta.noalias() += pi[k] * nu.row(k).transpose() * nu.row(k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.Delta);
  const Eigen::VectorXd w = es.eigenvalues();
  const double wmax = w.cwiseAbs().maxCoeff();
  const double wmin = w.cwiseAbs().minCoeff();
  c.cond = wmin > 0 ? wmax / wmin : std::numeric_limits<double>::infinity();
  if (!(c.cond < kConditionGate))
    throw SingularDeltaError("Delta condition number above 1e12");

  const Eigen::MatrixXd Dinv =
      es.eigenvectors() * w.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd Vz = nu * Dinv;               // K x d, rows nu_k^T Delta^{-1}
  c.zeta = Vz * nu.transpose();
  c.xi = Vz * signature.asDiagonal() * Vz.transpose();
  return c;
}

/// theta_kl = sum_r pi_r (Bv_kr + Bv_lr) xi_kl
///          - sum_s pi_s c_s (xi_sl zeta_ks + xi_sk zeta_ls),
/// with c_s = sum_r pi_r Bv_sr and Bv = B(1-B) (dense) or B (sparse).
Eigen::MatrixXd theta_from(const Eigen::MatrixXd& B, const Eigen::VectorXd& pi,
                           const Core& c, bool sparse) {
  const int K = static_cast<int>(B.rows());
  const Eigen::MatrixXd Bv =
      sparse ? B : (B.array() * (1.0 - B.array())).matrix();
  const Eigen::VectorXd cs = Bv * pi;  // c_s = sum_r pi_r Bv_sr

  Eigen::MatrixXd theta(K, K);
  for (int k = 0; k < K; ++k)
    for (int l = k; l < K; ++l) {
      double t1 = 0.0;
      for (int r = 0; r < K; ++r) t1 += pi[r] * (Bv(k, r) + Bv(l, r));
      t1 *= c.xi(k, l);
      double t2 = 0.0;
      for (int s = 0; s < K; ++s)
        t2 += pi[s] * cs[s] * (c.xi(s, l) * c.zeta(k, s) + c.xi(s, k) * c.zeta(l, s));
      theta(k, l) = theta(l, k) = t1 - t2;
    }
  return theta;
}

Eigen::MatrixXd sigma_from(const Eigen::MatrixXd& B, const Eigen::VectorXd& pi,
                           const Core& c, bool sparse, bool squared_factors) {
  const int K = static_cast<int>(B.rows());
  const Eigen::MatrixXd Bv =
      sparse ? B : (B.array() * (1.0 - B.array())).matrix();
  const Eigen::MatrixXd& z = c.zeta;

  Eigen::MatrixXd S(K, K);
  for (int k = 0; k < K; ++k) {
    double fk = 1.0 / pi[k] - 2.0 * z(k, k);
    if (squared_factors) fk *= fk;
    double t2 = 0.0, t3 = 0.0;
    for (int r = 0; r < K; ++r) {
      t2 += pi[r] * Bv(k, r) * z(k, r) * z(k, r);
      for (int s = 0; s < K; ++s)
        t3 += pi[r] * pi[s] * Bv(r, s) * z(k, r) * z(k, r) * z(k, s) * z(k, s);
    }
    S(k, k) = 4.0 * Bv(k, k) * z(k, k) * z(k, k) + 4.0 * t2 * fk + 2.0 * t3;
  }

  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      if (k == l) continue;
      double fk = 1.0 / pi[k] - 2.0 * z(k, k);
      double fl = 1.0 / pi[l] - 2.0 * z(l, l);
      if (squared_factors) {
        fk *= fk;
        fl *= fl;
      }
      double t3 = 0.0, t4 = 0.0, t5 = 0.0, t6 = 0.0;
      for (int r = 0; r < K; ++r) {
        t3 += pi[r] * Bv(k, r) * z(l, r) * z(l, r);
        t4 += pi[r] * Bv(l, r) * z(k, r) * z(k, r);
        t5 += pi[r] * (Bv(k, r) + Bv(l, r)) * z(k, r) * z(r, l);
        for (int s = 0; s < K; ++s) {
          const double cross = z(k, r) * z(l, s) + z(l, r) * z(k, s);
          t6 += pi[r] * pi[s] * Bv(r, s) * cross * cross;
        }
      }
      S(k, l) = (Bv(k, k) + Bv(l, l)) * z(k, l) * z(k, l) +
                2.0 * Bv(k, l) * z(k, k) * z(l, l) + t3 * fk + t4 * fl -
                2.0 * t5 * z(k, l) + 0.5 * t6;
    }
  return 0.5 * (S + S.transpose());
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> delta_and_zeta(const Eigen::VectorXd& pi,
                                                           const Eigen::MatrixXd& nu) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nu.cols());
  const Core c = build_core(pi, nu, ones);
  return {c.Delta, c.zeta};
}

double delta_condition(const Eigen::VectorXd& pi, const Eigen::MatrixXd& nu) {
  const int K = static_cast<int>(nu.rows());
  const int d = static_cast<int>(nu.cols());
  Eigen::MatrixXd Delta = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < K; ++k) Delta.noalias() += pi[k] * nu.row(k).transpose() * nu.row(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Delta, Eigen::EigenvaluesOnly);
  const double wmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double wmin = es.eigenvalues().cwiseAbs().minCoeff();
  return wmin > 0 ? wmax / wmin : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd theta_dense(const ModelSpec& model, const LatentPositions& lp) {
  return theta_from(model.B, model.pi, build_core(model.pi, lp.nu, lp.signature()), false);
}

Eigen::MatrixXd theta_sparse(const ModelSpec& model, const LatentPositions& lp) {
  return theta_from(model.B, model.pi, build_core(model.pi, lp.nu, lp.signature()), true);
}

Eigen::MatrixXd sigma_dense(const ModelSpec& model, const LatentPositions& lp) {
  return sigma_from(model.B, model.pi, build_core(model.pi, lp.nu, lp.signature()), false,
                    false);
}

Eigen::MatrixXd sigma_sparse(const ModelSpec& model, const LatentPositions& lp,
                             SparseVariant variant) {
  return sigma_from(model.B, model.pi, build_core(model.pi, lp.nu, lp.signature()), true,
                    variant == SparseVariant::as_printed);
}

Eigen::MatrixXd naive_variance(const ModelSpec& model, Regime regime) {
  const int K = model.K;
  Eigen::MatrixXd V(K, K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      const double bv =
          regime == Regime::dense ? model.B(k, l) * (1.0 - model.B(k, l)) : model.B(k, l);
      V(k, l) = k == l ? 2.0 * bv / (model.pi[k] * model.pi[k])
                       : bv / (model.pi[k] * model.pi[l]);
    }
  return V;
}

Eigen::MatrixXd plug_in_theta(const Eigen::MatrixXd& B_hat, const Eigen::VectorXd& pi_hat,
                              const Eigen::MatrixXd& nu_hat, const Eigen::VectorXd& signature,
                              Regime regime) {
  try {
    const Core c = build_core(pi_hat, nu_hat, signature);
    return theta_from(B_hat, pi_hat, c, regime == Regime::sparse);
  } catch (const SingularDeltaError&) {
    throw SingularDeltaError("estimated Delta-hat condition number above 1e12");
  }
}

AsymptoticSummary asymptotic_summary(const ModelSpec& model, Regime regime) {
  const LatentPositions lp = latent_positions(model);
  const Core c = build_core(model.pi, lp.nu, lp.signature());

  AsymptoticSummary s;
  s.regime = regime;
  s.Delta = c.Delta;
  s.zeta = c.zeta;
  s.delta_cond = c.cond;
  const bool sparse = regime == Regime::sparse;
  s.theta = theta_from(model.B, model.pi, c, sparse);
  s.sigma2 = sigma_from(model.B, model.pi, c, sparse, false);
  if (sparse) s.sigma2_printed = sigma_from(model.B, model.pi, c, true, true);
  s.naive_var = naive_variance(model, regime);
  return s;
}

FisherBundle fisher_info_2block(double p, double q, double pi_p) {
  const double pi_q = 1.0 - pi_p;
  for (double v : {p, q, p * q, p * p, q * q, pi_p})
    if (!(v > 0.0) || !(v < 1.0))
      throw DegenerateParamsError("parameters must keep all probabilities inside (0, 1)");

  FisherBundle fb;
  fb.info.resize(2, 2);
  fb.info << 2 * pi_p * pi_p / (1 - p * p) + pi_p * pi_q * q / (p * (1 - p * q)),
      pi_p * pi_q / (1 - p * q), pi_p * pi_q / (1 - p * q),
      2 * pi_q * pi_q / (1 - q * q) + pi_p * pi_q * p / (q * (1 - p * q));
  fb.jacobian.resize(3, 2);  // vech(B) = (B11, B12, B22)
  fb.jacobian << 2 * p, 0, q, p, 0, 2 * q;
  fb.mle_cov = fb.jacobian * fb.info.inverse() * fb.jacobian.transpose();
  return fb;
}

FisherBundle fisher_info_3block(double r1, double r2, double r3, double theta, double gamma,
                                const Eigen::Vector3d& pi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  const double cd = std::cos(theta - gamma), sd = std::sin(theta - gamma);

  Eigen::Matrix3d B;
  B << r1 * r1, r1 * r2 * ct, r1 * r3 * cg, r1 * r2 * ct, r2 * r2, r2 * r3 * cd,
      r1 * r3 * cg, r2 * r3 * cd, r3 * r3;
  if (B.minCoeff() <= 0.0 || B.maxCoeff() >= 1.0)
    throw DegenerateParamsError("implied B leaves (0, 1)");

  // dB_kl/d(r1,r2,r3,theta,gamma) for the vech order (11,12,13,22,23,33)
  Eigen::Matrix<double, 6, 5> J;
  J << 2 * r1, 0, 0, 0, 0,
      r2 * ct, r1 * ct, 0, -r1 * r2 * st, 0,
      r3 * cg, 0, r1 * cg, 0, -r1 * r3 * sg,
      0, 2 * r2, 0, 0, 0,
      0, r3 * cd, r2 * cd, -r2 * r3 * sd, r2 * r3 * sd,
      0, 0, 2 * r3, 0, 0;
  const int kidx[6] = {0, 0, 0, 1, 1, 2};
  const int lidx[6] = {0, 1, 2, 1, 2, 2};

  // per-pair limit weights n_kl / n^2: pi_k^2/2 on the diagonal, pi_k pi_l off
  FisherBundle fb;
  fb.info = Eigen::MatrixXd::Zero(5, 5);
  for (int t = 0; t < 6; ++t) {
    const int k = kidx[t], l = lidx[t];
    const double w = k == l ? 0.5 * pi[k] * pi[k] : pi[k] * pi[l];
    const double bv = B(k, l) * (1.0 - B(k, l));
    fb.info.noalias() += (w / bv) * J.row(t).transpose() * J.row(t);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fb.info, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff())
    throw SingularInfoError("Fisher information is numerically singular");

  fb.jacobian = J;
  fb.mle_cov = J * fb.info.inverse() * J.transpose();
  return fb;
}

namespace {

double sum_upper(const Eigen::MatrixXd& M) {
  double acc = 0.0;
  for (int k = 0; k < M.rows(); ++k)
    for (int l = k; l < M.cols(); ++l) acc += M(k, l);
  return acc;
}

}  // namespace

std::vector<MsePoint> mse_surface_2block(int grid_a, int grid_b, double lo, double hi,
                                         double pi_p) {
  std::vector<MsePoint> out;
  out.reserve(static_cast<std::size_t>(grid_a) * grid_b);
  for (int i = 0; i < grid_a; ++i)
    for (int j = 0; j < grid_b; ++j) {
      MsePoint pt;
      pt.a = lo + (hi - lo) * i / (grid_a - 1.0);  // p
      pt.b = lo + (hi - lo) * j / (grid_b - 1.0);  // q
      try {
        const ModelSpec model = rank1_2block_model(pt.a, pt.b, pi_p);
        const LatentPositions lp = latent_positions(model);
        pt.mse_S = sum_upper(sigma_dense(model, lp));
        pt.mse_N = sum_upper(naive_variance(model, Regime::dense));
        pt.mse_M = fisher_info_2block(pt.a, pt.b, pi_p).mle_cov.trace();
      } catch (const Error&) {
        pt.feasible = false;
      }
      out.push_back(pt);
    }
  return out;
}

std::vector<MsePoint> mse_surface_3block(int grid_a, int grid_b, double r2_lo, double r2_hi,
                                         double th_lo, double th_hi, double r3, double gamma) {
  const Eigen::Vector3d pi(1.0 / 3, 1.0 / 3, 1.0 / 3);
  std::vector<MsePoint> out;
  out.reserve(static_cast<std::size_t>(grid_a) * grid_b);
  for (int i = 0; i < grid_a; ++i)
    for (int j = 0; j < grid_b; ++j) {
      MsePoint pt;
      pt.a = r2_lo + (r2_hi - r2_lo) * i / (grid_a - 1.0);  // r2
      pt.b = th_lo + (th_hi - th_lo) * j / (grid_b - 1.0);  // theta
      const double r1 = 1.0 - pt.a;
      try {
        const ModelSpec model = rank2_3block_model(r1, pt.a, r3, pt.b, gamma, pi);
        const LatentPositions lp = latent_positions(model);
        pt.mse_S = sum_upper(sigma_dense(model, lp));
        pt.mse_N = sum_upper(naive_variance(model, Regime::dense));
        pt.mse_M = fisher_info_3block(r1, pt.a, r3, pt.b, gamma, pi).mle_cov.trace();
      } catch (const Error&) {
        pt.feasible = false;
      }
      out.push_back(pt);
    }
  return out;
}

MsePoint mse_point_explicit(const ModelSpec& model) {
  MsePoint pt;
  const LatentPositions lp = latent_positions(model);
  pt.mse_S = sum_upper(sigma_dense(model, lp));
  pt.mse_N = sum_upper(naive_variance(model, Regime::dense));
  // At full rank the rank-constrained and naive MLEs coincide; otherwise no
  // generic minimal parametrization is available.
  pt.mse_M = model.d == model.K ? pt.mse_N : std::numeric_limits<double>::quiet_NaN();
  return pt;
}

}  // namespace sbmest
