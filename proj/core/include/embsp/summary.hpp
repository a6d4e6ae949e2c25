#pragma once

#include <utility>

#include <Eigen/Dense>

#include "embsp/sampler.hpp"

namespace embsp {

struct PosteriorSummary {
  Eigen::MatrixXd B_mean;
  Eigen::MatrixXd Sigma_mean;
  Eigen::MatrixXd B_lower;
  Eigen::MatrixXd B_upper;
  Eigen::MatrixXd Sigma_lower;
  Eigen::MatrixXd Sigma_upper;
  Eigen::VectorXd xi_mean;
  /// Posterior mean of ||B_j Sigma^{-1/2}|| per row.
  Eigen::VectorXd row_score_mean;
  double level = 0.95;
  long draws = 0;
};

/// Zero-based order-statistic positions (lower, upper) of a central interval
/// at `level` among `draws` sorted values:
///   lower = floor(alpha/2 (N-1)), upper = ceil((1 - alpha/2)(N-1)).
std::pair<long, long> credible_positions(long draws, double level);

/// Element-wise posterior means and central credible intervals.
/// Throws std::logic_error on empty input.
PosteriorSummary posterior_summary(const PosteriorSamples& samples, double level = 0.95);

}  // namespace embsp
