#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "embsp/rng.hpp"
#include "embsp/sampler.hpp"

namespace embsp {

struct ExperimentConfig {
  int id = 0;
  long n = 25;
  long p = 125;
  long q = 3;
  long s0 = 2;
  double sigma2 = 2.0;
  double rho = 0.5;
  double coef_lo = 0.5;
  double coef_hi = 5.0;
  long replicates = 20;
  SamplerConfig sampler;
  std::uint64_t seed = 0;

  void validate() const;

  /// Settings of the six simulation experiments (id 1..6) with the desk-scale
  /// sampler defaults (3000 iterations, 1000 burn-in, 20 replicates).
  static ExperimentConfig standard(int id);
};

struct SyntheticDataset {
  RegressionData data;
  Eigen::MatrixXd B0;
  Eigen::MatrixXd Sigma0;
  /// Zero-based rows of B0 that are nonzero, ascending.
  std::vector<Eigen::Index> support;
};

/// Gamma_ij = scale * rho^{|i-j|}.
Eigen::MatrixXd ar1_matrix(Eigen::Index dim, double rho, double scale = 1.0);

/// Symmetric positive square root of an SPD matrix.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m);

/// X rows iid N(0, Gamma) drawn with the AR(1) recursion; s0 support rows with
/// entries uniform on [-hi, -lo] U [lo, hi]; Sigma0 = sigma2 * rho^{|i-j|};
/// Y = X B0 + E Sigma0^{1/2}.
SyntheticDataset generate_synthetic(const ExperimentConfig& cfg, Rng& rng);

struct CovarianceMetrics {
  double spectral_error = 0.0;
  double frobenius_error = 0.0;
  /// ||(B_hat - B0) Sigma0^{-1/2}||_F.
  double coefficient_error = 0.0;
};

CovarianceMetrics covariance_metrics(const Eigen::MatrixXd& Sigma_hat, const Eigen::MatrixXd& Sigma0,
                                     const Eigen::MatrixXd& B_hat, const Eigen::MatrixXd& B0);

struct MetricsRecord {
  int experiment = 0;
  long replicate = 0;
  CovarianceMetrics metrics;
  bool exact_recovery = false;
  long true_positives = 0;
  long false_positives = 0;
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct ConjugatePosterior {
  Eigen::MatrixXd B_mean;
  /// Empty when df - q - 1 <= 0.
  Eigen::MatrixXd Sigma_mean;
  double df = 0.0;
  Eigen::MatrixXd scale;
  bool sigma_mean_defined() const noexcept { return Sigma_mean.size() > 0; }
};

/// Closed-form posterior with every xi frozen at xi_fixed: with D = tau xi I,
/// A = X'X + D^{-1}, M = A^{-1} X'Y, B|Y has mean M and
/// Sigma|Y ~ IW(nu + n, Phi + Y'Y - Y'X M).
ConjugatePosterior conjugate_oracle(const RegressionData& data, const HyperParams& hp, double xi_fixed);

struct SuiteOptions {
  std::vector<int> ids = {1, 2, 3, 4, 5, 6};
  long replicates = 20;
  long iterations = 3000;
  long burn_in = 1000;
  std::uint64_t seed = 0;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  double probability_cutoff = 0.5;
  /// Progress callback, called from worker threads under a lock.
  std::function<void(const MetricsRecord&)> on_record;
};

struct ExperimentMedians {
  int experiment = 0;
  long n = 0;
  long p = 0;
  long q = 0;
  long s0 = 0;
  long replicates = 0;
  long failures = 0;
  double spectral_error = 0.0;
  double frobenius_error = 0.0;
  double coefficient_error = 0.0;
  double exact_recovery_rate = 0.0;
  double zero_fp_rate = 0.0;
};

struct SuiteResult {
  /// Ordered by (experiment, replicate).
  std::vector<MetricsRecord> records;
  std::vector<ExperimentMedians> medians;
};

/// RNG stream of replicate r of experiment e: (e << 32) | r.
std::uint64_t replicate_stream(int experiment, long replicate);

/// One replicate: data generation, chain, metrics and selection.
MetricsRecord run_replicate(const ExperimentConfig& cfg, long replicate, double probability_cutoff = 0.5);

SuiteResult run_experiment_suite(const SuiteOptions& options);

/// Parses "1-6", "1,3,5" or "2"; ids outside 1..6 throw ParseError.
std::vector<int> parse_experiment_ids(std::string_view text);

/// CSV with header experiment,replicate,spectral_error,frobenius_error,coef_error,exact_recovery,tp,fp,seconds.
/// The seconds column holds NA unless `with_timing` is set, so that repeated runs are byte-identical.
std::string metrics_csv(const std::vector<MetricsRecord>& records, bool with_timing);
std::string medians_csv(const std::vector<ExperimentMedians>& medians);

}  // namespace embsp
