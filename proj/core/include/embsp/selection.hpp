#pragma once

#include <vector>

#include <Eigen/Dense>

#include "embsp/sampler.hpp"

namespace embsp {

struct SelectionResult {
  Eigen::VectorXd inclusion_probability;
  /// Zero-based row indices with inclusion probability above the cutoff, ascending.
  std::vector<Eigen::Index> selected;
  double threshold = 0.0;
  double probability_cutoff = 0.5;
};

/// ||B_j Sigma^{-1/2}||_2 for every row j, computed as ||L^{-1} B_j'|| with Sigma = L L'.
Eigen::VectorXd row_scores(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Sigma);

/// sqrt(log p / n) / (p log n): strictly smaller order than sqrt(log p / n) / p.
double default_threshold(long n, long p);

/// Fraction of draws with row score above a_n; rows above the cutoff are selected.
SelectionResult select(const PosteriorSamples& samples, double a_n, double probability_cutoff = 0.5);

/// Same rule applied to precomputed per-draw scores (rows = draws, cols = variables).
SelectionResult select_from_scores(const Eigen::MatrixXd& scores, double a_n, double probability_cutoff = 0.5);

}  // namespace embsp
