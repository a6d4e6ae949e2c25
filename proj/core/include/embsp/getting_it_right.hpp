#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "embsp/sampler.hpp"

namespace embsp {

struct TestFunction {
  std::string name;
  std::function<double(const ChainState&)> eval;
};

/// B_11, B_11^2, tr Sigma, log xi_1 and, for TPBN-type families, log zeta_1.
std::vector<TestFunction> default_test_functions(const MixingFamily& family);

struct GirConfig {
  long n = 15;
  long p = 8;
  long q = 2;
  HyperParams hp;
  long samples = 20000;
  /// Gibbs sweeps (each followed by a Y redraw) between recorded successive-conditional states.
  long thinning = 5;
  long burn_in = 1000;
  /// Batches for the successive-side standard error.
  long batches = 50;
  std::uint64_t seed = 1;
  /// Corrupts the Sigma update; nonzero only in mutation runs.
  double sigma_df_offset = 0.0;
  std::vector<TestFunction> functions;

  /// Horseshoe prior, tau = 1, nu = q + 5, Phi = I, default test functions.
  static GirConfig standard(long n = 15, long p = 8, long q = 2,
                            MixingFamily family = MixingFamily::horseshoe());
};

struct GirStatistic {
  std::string name;
  double mean_marginal = 0.0;
  double mean_successive = 0.0;
  double se_marginal = 0.0;
  double se_successive = 0.0;
  double z = 0.0;
};

struct GirResult {
  std::vector<GirStatistic> statistics;
  double max_abs_z() const;
};

/// Compares draws (theta, Y) from prior x likelihood with a chain that alternates
/// a Gibbs sweep on theta | Y with a redraw of Y | theta. Under correct kernels
/// both sides target the same joint law, so z = (m1 - m2) / sqrt(se1^2 + se2^2)
/// is approximately standard normal.
GirResult getting_it_right(const GirConfig& cfg);

/// One draw (B, Sigma, xi, zeta) from the prior.
ChainState draw_prior_state(const HyperParams& hp, long p, long q, double tau, Rng& rng);

/// Y = X B + E L' with Sigma = L L'.
Eigen::MatrixXd draw_response(const Eigen::MatrixXd& X, const ChainState& state, Rng& rng);

/// Standard error of the mean of an independent sample.
double iid_standard_error(const std::vector<double>& values);

/// Batch-means standard error of the mean of an autocorrelated sample.
double batch_means_standard_error(const std::vector<double>& values, long batches);

}  // namespace embsp
