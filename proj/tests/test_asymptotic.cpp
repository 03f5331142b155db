#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sbmest/asymptotic.hpp"

using namespace sbmest;

namespace {

ModelSpec explicit_model(const Eigen::MatrixXd& B, const Eigen::VectorXd& pi) {
  return validate_model(B, pi, 1.0);
}

}  // namespace

TEST_CASE("delta_and_zeta basics") {
  // K = 1: Delta = p, zeta = 1
  Eigen::MatrixXd nu1(1, 1);
  nu1 << std::sqrt(0.3);
  Eigen::VectorXd pi1(1);
  pi1 << 1.0;
  const auto [D1, z1] = delta_and_zeta(pi1, nu1);
  CHECK(D1(0, 0) == doctest::Approx(0.3));
  CHECK(z1(0, 0) == doctest::Approx(1.0));

  // rank-1 two-block: Delta = pi_p p^2 + pi_q q^2
  const ModelSpec m = rank1_2block_model(0.6, 0.3, 0.5);
  const LatentPositions lp = latent_positions(m);
  const auto [D2, z2] = delta_and_zeta(m.pi, lp.nu);
  CHECK(D2(0, 0) == doctest::Approx(0.5 * 0.36 + 0.5 * 0.09).epsilon(1e-12));

  // invertible B: zeta = diag(1/pi)
  std::mt19937_64 gen(11);
  for (int t = 0; t < 20; ++t) {
    const int K = 2 + static_cast<int>(gen() % 3);
    const Eigen::MatrixXd B = oracles::random_symmetric(K, 0.1, 0.9, gen);
    const Eigen::VectorXd pi = oracles::random_simplex(K, gen);
    ModelSpec mm;
    try {
      mm = explicit_model(B, pi);
    } catch (const Error&) {
      continue;
    }
    if (mm.d != K) continue;
    const LatentPositions lpp = latent_positions(mm);
    const auto [D, z] = delta_and_zeta(mm.pi, lpp.nu);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k) expect(k, k) = 1.0 / pi[k];
    CHECK((z - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("two-block closed forms match the general formulas on a 17x17 grid") {
  double worst_theta = 0.0, worst_sigma = 0.0, worst_naive = 0.0;
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 17; ++j)
      for (double pip : {0.5, 0.3, 0.7}) {
        const double p = 0.1 + 0.05 * i, q = 0.1 + 0.05 * j;
        const ModelSpec m = rank1_2block_model(p, q, pip);
        const LatentPositions lp = latent_positions(m);
        const Eigen::MatrixXd th = theta_dense(m, lp);
        const Eigen::MatrixXd sg = sigma_dense(m, lp);
        const Eigen::MatrixXd nv = naive_variance(m, Regime::dense);
        const auto cf = oracles::two_block_closed_forms(p, q, pip);
        worst_theta = std::max({worst_theta, std::abs(th(0, 0) - cf.theta11),
                                std::abs(th(0, 1) - cf.theta12),
                                std::abs(th(1, 1) - cf.theta22)});
        worst_sigma = std::max({worst_sigma, std::abs(sg(0, 0) - cf.sigma11),
                                std::abs(sg(0, 1) - cf.sigma12),
                                std::abs(sg(1, 1) - cf.sigma22)});
        worst_naive = std::max({worst_naive, std::abs(nv(0, 0) - cf.naive11),
                                std::abs(nv(0, 1) - cf.naive12),
                                std::abs(nv(1, 1) - cf.naive22)});
      }
  CHECK(worst_theta < 1e-10);
  CHECK(worst_sigma < 1e-10);
  CHECK(worst_naive < 1e-12);
}

TEST_CASE("pinned closed-form values at canonical points") {
  // symmetric point: theta_11 vanishes by cancellation and sigma_11 = 1.125
  const ModelSpec sym = rank1_2block_model(0.5, 0.5, 0.5);
  const LatentPositions lps = latent_positions(sym);
  CHECK(std::abs(theta_dense(sym, lps)(0, 0)) < 1e-12);
  CHECK(sigma_dense(sym, lps)(0, 0) == doctest::Approx(1.125).epsilon(1e-12));

  const ModelSpec m = rank1_2block_model(0.6, 0.3, 0.5);
  const LatentPositions lp = latent_positions(m);
  const auto cf = oracles::two_block_closed_forms(0.6, 0.3, 0.5);
  CHECK(theta_dense(m, lp)(0, 0) == doctest::Approx(cf.theta11).epsilon(1e-12));
  CHECK(theta_dense(m, lp)(0, 1) == doctest::Approx(cf.theta12).epsilon(1e-12));
  CHECK(theta_dense(m, lp)(1, 1) == doctest::Approx(cf.theta22).epsilon(1e-12));
}

TEST_CASE("variance-decomposition partial sums agree with the printed formulas") {
  std::mt19937_64 gen(5150);
  int checked = 0;
  while (checked < 60) {
    const int K = 2 + static_cast<int>(gen() % 3);
    Eigen::MatrixXd B;
    if (checked % 2 == 0) {
      B = oracles::random_symmetric(K, 0.1, 0.9, gen);
    } else {
      std::uniform_real_distribution<double> u(0.3, 0.9);
      Eigen::VectorXd v(K);
      for (int i = 0; i < K; ++i) v[i] = u(gen);
      B = 0.9 * v * v.transpose();  // rank-deficient branch
    }
    const Eigen::VectorXd pi = oracles::random_simplex(K, gen);
    ModelSpec m;
    LatentPositions lp;
    try {
      m = explicit_model(B, pi);
      lp = latent_positions(m);
    } catch (const Error&) {
      continue;
    }
    const auto [D, z] = delta_and_zeta(m.pi, lp.nu);
    const Eigen::MatrixXd dense_oracle = oracles::sigma_by_partial_sums(m.B, m.pi, z, false);
    const Eigen::MatrixXd sparse_oracle = oracles::sigma_by_partial_sums(m.B, m.pi, z, true);
    CHECK((sigma_dense(m, lp) - dense_oracle).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sigma_sparse(m, lp) - sparse_oracle).cwiseAbs().maxCoeff() < 1e-10);
    ++checked;
  }
}

TEST_CASE("full-rank collapse: theta = 0, zeta diagonal, sigma = naive") {
  std::mt19937_64 gen(8675309);
  int checked = 0;
  while (checked < 50) {
    const int K = 1 + static_cast<int>(gen() % 4);
    const Eigen::MatrixXd B = oracles::random_symmetric(K, 0.1, 0.9, gen);
    const Eigen::VectorXd pi = oracles::random_simplex(K, gen);
    ModelSpec m;
    try {
      m = explicit_model(B, pi);
    } catch (const Error&) {
      continue;
    }
    if (m.d != K) continue;
    LatentPositions lp;
    try {
      lp = latent_positions(m);
    } catch (const Error&) {
      continue;
    }
    CHECK(theta_dense(m, lp).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(theta_sparse(m, lp).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sigma_dense(m, lp) - naive_variance(m, Regime::dense)).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((sigma_sparse(m, lp) - naive_variance(m, Regime::sparse)).cwiseAbs().maxCoeff() <
          1e-10);
    ++checked;
  }
}

TEST_CASE("sparse formulas: structural relation to the dense ones") {
  // On a model whose entries are distinct scaled primes, replacing every
  // (1 - B) factor by 1 in the dense theta reproduces the sparse theta.
  Eigen::MatrixXd B(3, 3);
  B << 0.02, 0.03, 0.05, 0.03, 0.07, 0.11, 0.05, 0.11, 0.13;
  Eigen::VectorXd pi(3);
  pi << 0.2, 0.3, 0.5;
  const ModelSpec m = explicit_model(B, pi);
  const LatentPositions lp = latent_positions(m);

  const ModelSpec scaled = m;  // theta_sparse drops the (1-B) factors itself
  CHECK((theta_sparse(scaled, lp) - theta_dense(scaled, lp)).cwiseAbs().maxCoeff() > 1e-6);
  // K = 1 sanity: sigma-tilde = 2p, theta structural identity
  Eigen::MatrixXd B1(1, 1);
  B1 << 0.3;
  Eigen::VectorXd pi1(1);
  pi1 << 1.0;
  const ModelSpec m1 = explicit_model(B1, pi1);
  const LatentPositions lp1 = latent_positions(m1);
  CHECK(sigma_sparse(m1, lp1)(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(sigma_dense(m1, lp1)(0, 0) == doctest::Approx(2 * 0.3 * 0.7).epsilon(1e-12));
}

TEST_CASE("as-printed sparse variant differs exactly by the squared factors") {
  const ModelSpec m = rank1_2block_model(0.6, 0.3, 0.5);
  const LatentPositions lp = latent_positions(m);
  const Eigen::MatrixXd consistent = sigma_sparse(m, lp, SparseVariant::corollary_consistent);
  const Eigen::MatrixXd printed = sigma_sparse(m, lp, SparseVariant::as_printed);
  const auto [D, z] = delta_and_zeta(m.pi, lp.nu);

  // diagonal: the two variants differ by 4 sum_r pi_r B_kr zeta_kr^2 (f^2 - f)
  for (int k = 0; k < 2; ++k) {
    const double f = 1.0 / m.pi[k] - 2.0 * z(k, k);
    double t2 = 0.0;
    for (int r = 0; r < 2; ++r) t2 += m.pi[r] * m.B(k, r) * z(k, r) * z(k, r);
    CHECK(printed(k, k) - consistent(k, k) ==
          doctest::Approx(4.0 * t2 * (f * f - f)).epsilon(1e-10));
  }
  // and only the corollary_consistent variant collapses at full rank
  Eigen::MatrixXd Bf(2, 2);
  Bf << 0.5, 0.2, 0.2, 0.4;
  Eigen::VectorXd pif(2);
  pif << 0.6, 0.4;
  const ModelSpec mf = explicit_model(Bf, pif);
  const LatentPositions lpf = latent_positions(mf);
  const Eigen::MatrixXd nv = naive_variance(mf, Regime::sparse);
  CHECK((sigma_sparse(mf, lpf) - nv).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((sigma_sparse(mf, lpf, SparseVariant::as_printed) - nv).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("naive_variance arithmetic and full-rank equality") {
  Eigen::MatrixXd B(2, 2);
  B << 0.5, 0.25, 0.25, 0.4;
  Eigen::VectorXd pi(2);
  pi << 0.5, 0.5;
  const ModelSpec m = explicit_model(B, pi);
  const Eigen::MatrixXd V = naive_variance(m, Regime::dense);
  CHECK(V(0, 0) == doctest::Approx(2.0));
  CHECK(V(0, 1) == doctest::Approx(0.75));
  const LatentPositions lp = latent_positions(m);
  CHECK((sigma_dense(m, lp) - V).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("plug_in_theta: substitution identity, full-rank zero, continuity") {
  const ModelSpec m = rank1_2block_model(0.6, 0.3, 0.5);
  const LatentPositions lp = latent_positions(m);
  const Eigen::MatrixXd exact =
      plug_in_theta(m.B, m.pi, lp.nu, lp.signature(), Regime::dense);
  CHECK((exact - theta_dense(m, lp)).cwiseAbs().maxCoeff() < 1e-13);

  Eigen::MatrixXd Bf(2, 2);
  Bf << 0.5, 0.2, 0.2, 0.4;
  Eigen::VectorXd pif(2);
  pif << 0.6, 0.4;
  const ModelSpec mf = explicit_model(Bf, pif);
  const LatentPositions lpf = latent_positions(mf);
  CHECK(plug_in_theta(mf.B, mf.pi, lpf.nu, lpf.signature(), Regime::dense)
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  // continuity as the perturbation vanishes
  std::mt19937_64 gen(13);
  Eigen::MatrixXd H = oracles::random_symmetric(2, -1.0, 1.0, gen);
  double prev = 1e9;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const Eigen::MatrixXd th =
        plug_in_theta(m.B + eps * H, m.pi, lp.nu, lp.signature(), Regime::dense);
    const double dev = (th - theta_dense(m, lp)).cwiseAbs().maxCoeff();
    CHECK(dev < prev + 1e-12);
    prev = dev;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("fisher_info_2block pinned values and symmetry") {
  const FisherBundle fb = fisher_info_2block(0.5, 0.5, 0.5);
  CHECK(fb.info(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fb.info(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(fb.mle_cov.rows() == 3);

  // swapping (p, pi_p) with (q, pi_q) transposes the information matrix
  const FisherBundle a = fisher_info_2block(0.6, 0.3, 0.4);
  const FisherBundle b = fisher_info_2block(0.3, 0.6, 0.6);
  CHECK(a.info(0, 0) == doctest::Approx(b.info(1, 1)).epsilon(1e-12));
  CHECK(a.info(0, 1) == doctest::Approx(b.info(1, 0)).epsilon(1e-12));

  CHECK_THROWS_AS(fisher_info_2block(1.0, 0.3, 0.5), DegenerateParamsError);

  // MLE covariance never exceeds the naive variance in trace
  for (double p = 0.15; p < 0.9; p += 0.15)
    for (double q = 0.15; q < 0.9; q += 0.15) {
      const FisherBundle fb2 = fisher_info_2block(p, q, 0.5);
      const auto cf = oracles::two_block_closed_forms(p, q, 0.5);
      CHECK(fb2.mle_cov.trace() <= cf.naive11 + cf.naive12 + cf.naive22 + 1e-9);
    }
}

TEST_CASE("fisher_info_3block: gradients, positive definiteness, brute-force oracle") {
  const Eigen::Vector3d pi(1.0 / 3, 1.0 / 3, 1.0 / 3);
  const double r1 = 0.5, r2 = 0.5, r3 = 0.7, th = 0.8, ga = 0.5;
  const FisherBundle fb = fisher_info_3block(r1, r2, r3, th, ga, pi);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fb.info, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  // finite-difference Jacobian of vech(B)
  auto vech = [](const Eigen::Matrix<double, 5, 1>& x) {
    const double a = x[0], b = x[1], c = x[2], t = x[3], g = x[4];
    Eigen::Matrix<double, 6, 1> v;
    v << a * a, a * b * std::cos(t), a * c * std::cos(g), b * b, b * c * std::cos(t - g),
        c * c;
    return v;
  };
  Eigen::Matrix<double, 5, 1> x;
  x << r1, r2, r3, th, ga;
  const double h = 1e-6;
  for (int a = 0; a < 5; ++a) {
    Eigen::Matrix<double, 5, 1> xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    const Eigen::Matrix<double, 6, 1> fd = (vech(xp) - vech(xm)) / (2 * h);
    for (int t6 = 0; t6 < 6; ++t6)
      CHECK(std::abs(fb.jacobian(t6, a) - fd[t6]) /
                std::max(1.0, std::abs(fd[t6])) < 1e-6);
  }

  // independent summation: accumulate the information matrix pair by pair
  // from finite-difference gradients
  Eigen::MatrixXd info_fd = Eigen::MatrixXd::Zero(5, 5);
  const int kidx[6] = {0, 0, 0, 1, 1, 2};
  const int lidx[6] = {0, 1, 2, 1, 2, 2};
  const Eigen::Matrix<double, 6, 1> v0 = vech(x);
  for (int t6 = 0; t6 < 6; ++t6) {
    Eigen::Matrix<double, 5, 1> grad;
    for (int a = 0; a < 5; ++a) {
      Eigen::Matrix<double, 5, 1> xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      grad[a] = (vech(xp)[t6] - vech(xm)[t6]) / (2 * h);
    }
    const int k = kidx[t6], l = lidx[t6];
    const double w = k == l ? 0.5 * pi[k] * pi[k] : pi[k] * pi[l];
    info_fd += (w / (v0[t6] * (1.0 - v0[t6]))) * grad * grad.transpose();
  }
  CHECK((info_fd - fb.info).cwiseAbs().maxCoeff() < 1e-5);

  // duplicated third block: information and covariance stay finite and PSD
  const FisherBundle dup = fisher_info_3block(0.5, 0.6, 0.6, 0.7, 0.7, pi);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(dup.mle_cov, Eigen::EigenvaluesOnly);
  CHECK(es2.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("mse surfaces reproduce the analytic ratio patterns") {
  const auto grid2 = mse_surface_2block(17, 17, 0.1, 0.9, 0.5);
  for (const auto& pt : grid2) {
    REQUIRE(pt.feasible);
    CHECK(pt.mse_S < pt.mse_N);
    CHECK(pt.mse_S / pt.mse_M >= 1.0 - 1e-9);
  }

  const auto grid3 =
      mse_surface_3block(9, 9, 0.1, 0.9, 0.1, 1.5707963267948966 - 0.1, 0.7, 0.5);
  int feasible = 0;
  for (const auto& pt : grid3) {
    if (!pt.feasible) continue;
    ++feasible;
    CHECK(pt.mse_S < pt.mse_N);
    CHECK(pt.mse_S / pt.mse_M >= 1.0 - 1e-9);
  }
  CHECK(feasible == 81);

  // a full-rank explicit model: spectral and naive limits coincide
  Eigen::MatrixXd B(2, 2);
  B << 0.5, 0.2, 0.2, 0.4;
  Eigen::VectorXd pi(2);
  pi << 0.6, 0.4;
  const MsePoint pt = mse_point_explicit(explicit_model(B, pi));
  CHECK(pt.mse_S / pt.mse_N == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pt.mse_M == doctest::Approx(pt.mse_N));
}

TEST_CASE("symmetry of every asymptotic matrix") {
  std::mt19937_64 gen(40);
  for (int t = 0; t < 10; ++t) {
    const int K = 2 + static_cast<int>(gen() % 3);
    const Eigen::MatrixXd B = oracles::random_symmetric(K, 0.1, 0.9, gen);
    const Eigen::VectorXd pi = oracles::random_simplex(K, gen);
    ModelSpec m;
    LatentPositions lp;
    try {
      m = explicit_model(B, pi);
      lp = latent_positions(m);
    } catch (const Error&) {
      continue;
    }
    for (const Eigen::MatrixXd& M :
         {theta_dense(m, lp), theta_sparse(m, lp), sigma_dense(m, lp), sigma_sparse(m, lp)})
      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("singular Delta is gated") {
  // two identical latent positions with a third dimension of noise make Delta
  // rank-deficient when d pretends to be 2
  Eigen::MatrixXd nu(2, 2);
  nu << 0.5, 0.0, 0.5, 0.0;
  Eigen::VectorXd pi(2);
  pi << 0.5, 0.5;
  CHECK_THROWS_AS(delta_and_zeta(pi, nu), SingularDeltaError);
}
