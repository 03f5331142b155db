#ifndef SBMEST_MONTECARLO_HPP
#define SBMEST_MONTECARLO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbmest/asymptotic.hpp"
#include "sbmest/likelihood.hpp"
#include "sbmest/spectral.hpp"

namespace sbmest {

/// rho_n rule for a sweep: a constant, or the power law rho_n = n^{-a}.
struct RhoRule {
  enum class Kind { constant, power } kind = Kind::constant;
  double value = 1.0;

  double at(int n) const {
    return kind == Kind::constant ? value : std::pow(static_cast<double>(n), -value);
  }
  static RhoRule constant(double rho) { return {Kind::constant, rho}; }
  static RhoRule power(double a) { return {Kind::power, a}; }
};

struct EstimatorSet {
  bool naive = true;
  bool spectral = true;
  bool rank_mle = false;
};

struct RunOptions {
  bool fixed_tau = true;      // deterministic n_k ~ n pi_k vs i.i.d. labels
  bool recover_tau = true;    // cluster the embedding and record the tau-hat path
  bool estimate_d = false;    // record d-hat per replicate
  int threads = 0;            // 0 = hardware concurrency (capped by env)
};

/// Everything recorded for one replicate. Matrices on the tau-hat path are
/// aligned by psi so entries are comparable to B.
struct ReplicateRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Eigen::MatrixXd naive_true;     // B-hat^(N), known tau
  Eigen::MatrixXd spec_raw;       // B-hat^(S), known tau, raw
  Eigen::MatrixXd spec_corrected; // raw - theta-hat/(n rho)
  Eigen::MatrixXd rank_mle;       // B-hat^(M), known tau (when requested)
  Eigen::MatrixXd naive_rec;      // tau-hat path, aligned
  Eigen::MatrixXd spec_rec;       // tau-hat path, aligned, raw
  bool exact_recovery = false;
  int d_hat = -1;
};

struct ReplicateTable {
  ModelSpec model;  // rho field holds the *base* model rho; effective is rho_rule.at(n)
  int n = 0;
  int M = 0;
  RhoRule rho_rule;
  std::uint64_t master_seed = 0;
  RunOptions options;
  EstimatorSet estimators;
  std::vector<ReplicateRecord> records;
  int excluded = 0;  // replicates with errors (kept in records, skipped in stats)

  double rho_effective() const { return rho_rule.at(n); }
};

ReplicateTable run_replicates(const ModelSpec& model, int n, int M, const RhoRule& rho_rule,
                              const EstimatorSet& estimators, std::uint64_t seed,
                              const RunOptions& options = {});

/// Per-entry summary of the standardized statistic
/// n sqrt(rho) (B-hat_kl - B_kl - bias/(n rho)).
struct CltEntry {
  int k = 0, l = 0;
  double emp_mean = 0.0;
  double emp_var = 0.0;
  double theo_var = 0.0;
  double ratio = 0.0;    // emp_var / theo_var
  double ks = 0.0;       // KS distance of studentized samples to N(0,1)
  bool skipped = false;  // degenerate theoretical variance
};

struct CltReport {
  Regime regime = Regime::dense;
  int n = 0, M = 0;
  double rho = 1.0;
  std::vector<CltEntry> spectral;       // raw spectral vs (theta, sigma^2)
  std::vector<CltEntry> spectral_corrected;  // plug-in corrected vs (0, sigma^2)
  std::vector<CltEntry> naive;          // vs (0, naive variances)
  std::vector<CltEntry> spectral_printed;    // sparse only: vs as_printed variances
  double recovery_rate = -1.0;
  std::map<int, int> d_hat_histogram;
  int excluded = 0;
};

/// Standardizes each estimator's samples against the matching (bias,
/// variance) pair from the summary. Throws MismatchedRegimeError when the
/// table's rho rule does not match the summary regime.
CltReport clt_report(const ReplicateTable& table, const AsymptoticSummary& summary);

/// Erdos-Renyi spectral estimate p-hat = lambda (1^T u)^2 / n^2 from the top
/// eigenpair, u sign-fixed so 1^T u >= 0.
double er_spectral_estimate(const GraphSample& g);
double er_spectral_estimate(const Eigen::MatrixXd& A);

struct RecoveryPoint {
  int n = 0;
  double recovery_rate = 0.0;
  double median_residual = 0.0;  // two-to-infinity alignment residual
};

std::vector<RecoveryPoint> recovery_curve(const ModelSpec& model, const std::vector<int>& n_list,
                                          int M, std::uint64_t seed, int threads = 0);

/// Thread cap: explicit argument, else SBMEST_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace sbmest

#endif
