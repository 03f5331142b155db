#include "sbmest/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "sbmest/rng.hpp"
#include "sbmest/stats.hpp"

namespace sbmest {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SBMEST_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

struct SpectralPieces {
  Eigen::MatrixXd raw;        // B-hat^(S)
  Eigen::MatrixXd corrected;  // raw - theta-hat/(n rho)
};

/// Known-label spectral estimate plus its plug-in bias correction. nu-hat_k =
/// (1/n_k) s_k^T U |Lambda|^{1/2}; the block matrix fed to the bias formula is
/// nu-hat I_pq nu-hat^T (no rho correction: the hatted quantities estimate the
/// rho-folded model and the rho's cancel inside theta-hat).
SpectralPieces spectral_with_correction(const Embedding& emb,
                                        const std::vector<std::int32_t>& labels, int K,
                                        double rho, int n, Regime regime) {
  const BlockEstimate est = spectral_block_estimate(emb, labels, K, rho);

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K, emb.d);
  Eigen::VectorXd sizes = Eigen::VectorXd::Zero(K);
  for (int i = 0; i < n; ++i) {
    G.row(labels[i]) += emb.U.row(i);
    sizes[labels[i]] += 1.0;
  }
  Eigen::VectorXd signature(emb.d), root(emb.d);
  for (int j = 0; j < emb.d; ++j) {
    signature[j] = emb.lambda[j] >= 0 ? 1.0 : -1.0;
    root[j] = std::sqrt(std::abs(emb.lambda[j]));
  }
  Eigen::MatrixXd nu_hat = G * root.asDiagonal();
  for (int k = 0; k < K; ++k) nu_hat.row(k) /= sizes[k];
  const Eigen::MatrixXd B_hat = nu_hat * signature.asDiagonal() * nu_hat.transpose();
  const Eigen::VectorXd pi_hat = sizes / static_cast<double>(n);

  SpectralPieces out;
  out.raw = est.raw;
  const Eigen::MatrixXd theta_hat = plug_in_theta(B_hat, pi_hat, nu_hat, signature, regime);
  out.corrected = est.raw - theta_hat / (n * rho);
  return out;
}

}  // namespace

ReplicateTable run_replicates(const ModelSpec& model, int n, int M, const RhoRule& rho_rule,
                              const EstimatorSet& estimators, std::uint64_t seed,
                              const RunOptions& options) {
  ReplicateTable table;
  table.model = model;
  table.n = n;
  table.M = M;
  table.rho_rule = rho_rule;
  table.master_seed = seed;
  table.options = options;
  table.estimators = estimators;
  table.records.resize(M);

  const double rho = rho_rule.at(n);
  ModelSpec eff = model;
  eff.rho = rho;
  // re-validate so rho * B stays a probability
  eff = validate_model(eff.B, eff.pi, rho);
  const Regime regime = rho_rule.kind == RhoRule::Kind::power ? Regime::sparse : Regime::dense;

  const std::vector<std::int32_t> fixed_tau =
      options.fixed_tau ? proportional_assignments(eff, n) : std::vector<std::int32_t>{};

  parallel_for(M, resolve_threads(options.threads), [&](int rep) {
    ReplicateRecord& rec = table.records[rep];
    rec.rep = rep;
    rec.seed = derive_seed(seed, static_cast<std::uint64_t>(rep));
    try {
      const std::vector<std::int32_t> tau =
          options.fixed_tau ? fixed_tau
                            : sample_assignments(eff, n, derive_seed(rec.seed, 0));
      const GraphSample g = sample_adjacency(eff, tau, derive_seed(rec.seed, 1));

      SufficientStats stats;
      if (estimators.naive || estimators.rank_mle) stats = binomial_counts(g, eff.K);
      if (estimators.naive) rec.naive_true = naive_mle(stats, rho);

      Embedding emb;
      const bool need_embedding = estimators.spectral || options.recover_tau;
      if (need_embedding) emb = top_eigenpairs(g, eff.d);

      if (estimators.spectral) {
        const SpectralPieces sp = spectral_with_correction(emb, tau, eff.K, rho, n, regime);
        rec.spec_raw = sp.raw;
        rec.spec_corrected = sp.corrected;
      }

      if (estimators.rank_mle) {
        if (eff.K == 2 && eff.d == 1) {
          const Eigen::MatrixXd base =
              rec.spec_raw.size() ? rec.spec_raw : naive_mle(stats, rho);
          rec.rank_mle =
              rank1_mle_2block(stats, rho, rank1_init_from_estimate(base)).B_hat;
        } else if (eff.K == 3 && eff.d == 2) {
          const Eigen::MatrixXd base =
              rec.spec_raw.size() ? rec.spec_raw : naive_mle(stats, rho);
          rec.rank_mle =
              rank2_mle_3block(stats, rho, rank2_init_from_estimate(base)).B_hat;
        }
      }

      if (options.recover_tau) {
        const ClusterResult clus = cluster_embedding(emb, eff.K, derive_seed(rec.seed, 2));
        const Alignment al = align_blocks(clus.labels, tau, eff.K);
        rec.exact_recovery = al.agreement == 1.0;
        // relabel tau-hat so block k matches true block k
        std::vector<std::int32_t> aligned(n);
        for (int i = 0; i < n; ++i) {
          int inv = 0;
          for (int k = 0; k < eff.K; ++k)
            if (al.psi[k] == clus.labels[i]) inv = k;
          aligned[i] = inv;
        }
        const SufficientStats rec_stats = binomial_counts(g, aligned, eff.K);
        rec.naive_rec = naive_mle(rec_stats, rho);
        rec.spec_rec = spectral_block_estimate(emb, aligned, eff.K, rho).raw;
      }

      if (options.estimate_d) rec.d_hat = estimate_rank(g);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });

  for (const ReplicateRecord& rec : table.records)
    if (!rec.ok) ++table.excluded;
  return table;
}

namespace {

CltEntry make_entry(int k, int l, const std::vector<double>& samples, double theo_var) {
  CltEntry e;
  e.k = k;
  e.l = l;
  e.theo_var = theo_var;
  if (theo_var <= 0.0 || samples.size() < 2) {
    e.skipped = true;
    return e;
  }
  e.emp_mean = mean(samples);
  e.emp_var = variance(samples);
  e.ratio = e.emp_var / theo_var;
  e.ks = ks_distance_studentized(samples);
  return e;
}

}  // namespace

CltReport clt_report(const ReplicateTable& table, const AsymptoticSummary& summary) {
  const double rho = table.rho_effective();
  const bool sparse_rule = table.rho_rule.kind == RhoRule::Kind::power;
  if (sparse_rule != (summary.regime == Regime::sparse))
    throw MismatchedRegimeError("table rho rule and summary regime disagree");
  if (!sparse_rule && rho != 1.0)
    throw MismatchedRegimeError("dense-regime report requires rho = 1");

  const int K = table.model.K;
  const int n = table.n;
  const double scale = n * std::sqrt(rho);

  CltReport rep;
  rep.regime = summary.regime;
  rep.n = n;
  rep.M = table.M;
  rep.rho = rho;
  rep.excluded = table.excluded;

  int recovered = 0, with_recovery = 0;
  for (const ReplicateRecord& r : table.records) {
    if (!r.ok) continue;
    if (table.options.recover_tau) {
      ++with_recovery;
      if (r.exact_recovery) ++recovered;
    }
    if (r.d_hat >= 0) ++rep.d_hat_histogram[r.d_hat];
  }
  if (with_recovery > 0) rep.recovery_rate = static_cast<double>(recovered) / with_recovery;

  for (int k = 0; k < K; ++k)
    for (int l = k; l < K; ++l) {
      std::vector<double> spec, spec_corr, naive;
      for (const ReplicateRecord& r : table.records) {
        if (!r.ok) continue;
        const double b = table.model.B(k, l);
        if (r.spec_raw.size())
          spec.push_back(scale * (r.spec_raw(k, l) - b - summary.theta(k, l) / (n * rho)));
        if (r.spec_corrected.size())
          spec_corr.push_back(scale * (r.spec_corrected(k, l) - b));
        if (r.naive_true.size()) naive.push_back(scale * (r.naive_true(k, l) - b));
      }
      if (!spec.empty()) rep.spectral.push_back(make_entry(k, l, spec, summary.sigma2(k, l)));
      if (!spec_corr.empty())
        rep.spectral_corrected.push_back(make_entry(k, l, spec_corr, summary.sigma2(k, l)));
      if (!naive.empty()) rep.naive.push_back(make_entry(k, l, naive, summary.naive_var(k, l)));
      if (!spec.empty() && summary.sigma2_printed.size())
        rep.spectral_printed.push_back(make_entry(k, l, spec, summary.sigma2_printed(k, l)));
    }
  return rep;
}

double er_spectral_estimate(const GraphSample& g) {
  GraphOp op(g);
  if (g.neighbors.empty()) return 0.0;
  const Embedding emb = top_eigenpairs(static_cast<const SymOp&>(op), 1);
  double dot = emb.U.col(0).sum();
  if (dot < 0) dot = -dot;  // sign convention 1^T u >= 0
  return emb.lambda[0] * dot * dot / (static_cast<double>(g.n) * g.n);
}

double er_spectral_estimate(const Eigen::MatrixXd& A) {
  if (A.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Embedding emb = top_eigenpairs(A, 1);
  double dot = emb.U.col(0).sum();
  if (dot < 0) dot = -dot;
  return emb.lambda[0] * dot * dot / (static_cast<double>(A.rows()) * A.rows());
}

std::vector<RecoveryPoint> recovery_curve(const ModelSpec& model, const std::vector<int>& n_list,
                                          int M, std::uint64_t seed, int threads) {
  std::vector<RecoveryPoint> out;
  for (std::size_t t = 0; t < n_list.size(); ++t) {
    const int n = n_list[t];
    if (t > 0 && n <= n_list[t - 1]) throw OutOfRangeError("n_list must be increasing");
    const std::vector<std::int32_t> tau = proportional_assignments(model, n);
    const Embedding pop = population_embedding(model, tau);

    std::vector<double> residuals(M);
    std::vector<char> recovered(M, 0);
    const std::uint64_t level_seed = derive_seed(seed, 1000 + t);
    parallel_for(M, resolve_threads(threads), [&](int rep) {
      const std::uint64_t rs = derive_seed(level_seed, rep);
      const GraphSample g = sample_adjacency(model, tau, derive_seed(rs, 1));
      const Embedding emb = top_eigenpairs(g, model.d);
      const ClusterResult clus = cluster_embedding(emb, model.K, derive_seed(rs, 2));
      recovered[rep] = align_blocks(clus.labels, tau, model.K).agreement == 1.0 ? 1 : 0;
      residuals[rep] = two_to_infinity_residual(emb.U, pop.U);
    });

    RecoveryPoint pt;
    pt.n = n;
    pt.recovery_rate =
        static_cast<double>(std::count(recovered.begin(), recovered.end(), 1)) / M;
    pt.median_residual = median(residuals);
    out.push_back(pt);
  }
  return out;
}

}  // namespace sbmest
