#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "embsp/priors.hpp"
#include "embsp/sampler.hpp"

namespace embsp {

/// max( sqrt(s0 log p / n), sqrt(q^2 log n / n), sqrt(q s0 log n / n) ).
double contraction_rate(long n, long p, long q, long s0);

struct TailCheck {
  double mass = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Prior mass of {||x|| >= a_n} under g_tau, computed as
///   int pi(xi) Q(q/2, a_n^2 / (2 tau xi)) dxi
/// with Q the regularized upper incomplete gamma; pass iff mass <= p^{-(1+u)}.
TailCheck check_tail_condition(const MixingFamily& family, double tau, int q, double a_n, long p, double u);

struct FloorCheck {
  double log_density = 0.0;
  /// -log g_tau(M0) / log p.
  double ratio = 0.0;
};

/// g_tau is radially non-increasing, so the infimum over the ball of radius M0
/// is attained on its boundary.
FloorCheck check_density_floor(const MixingFamily& family, double tau, int q, double m0, long p);

struct AssumptionFlags {
  bool A1 = false;
  bool A2_1 = false;
  bool A2_3 = false;
  bool A3_1 = false;
  bool A3_2 = false;
  bool A3_3 = false;

  double a1_ratio = 0.0;           // s0 log p / n
  double max_abs_x = 0.0;          // max |X_ij|
  double min_subset_eigen = 0.0;   // min over audited subsets of lambda_min(X_S'X_S) / n
  long subsets_checked = 0;
  double a3_1_ratio = 0.0;         // q / log p
  double a3_2_ratio = 0.0;         // q^2 log n / n
  double sigma_eigen_min = 0.0;
  double sigma_eigen_max = 0.0;
};

/// Finite-sample surrogates of the design, sparsity and covariance assumptions.
/// A2(3) audits the true support (rows of B0 with a nonzero entry) and
/// `subset_budget` random subsets of size <= 2 s0.
AssumptionFlags check_assumptions(const RegressionData& data, const Eigen::MatrixXd& B0, const Eigen::MatrixXd& Sigma0,
                                  long s0, long subset_budget, Rng& rng, double a3_1_tolerance = 0.0);

/// int_{||x|| >= a} ||x||^{-(d+k)} dx = 2 pi^{d/2} a^{-k} / (k Gamma(d/2)).
double volume_integral(int d, double k, double a);

/// Largest ratio g_tau(x1)/g_tau(x2) over balls of radius c0 eps_n centred at
/// the standardized true rows B0_j Sigma^{-1/2}. +inf when a ball reaches a
/// pole at the origin.
double flatness_ln(const MixingFamily& family, double tau, int q, const Eigen::MatrixXd& B0_rows,
                   const Eigen::MatrixXd& Sigma, double c0, double epsilon_n);

struct ConditionInputs {
  MixingFamily family = MixingFamily::horseshoe();
  double tau = 0.0;
  long n = 0;
  long p = 0;
  long q = 0;
  long s0 = 1;
  double u = 0.5;
  /// Defaults to epsilon_n / p.
  std::optional<double> a_n;
  double m0 = 1.0;
  double floor_ceiling = 10.0;
  std::optional<double> c0;
  /// Rows for l_n; when absent a single row of standardized norm m0 is used.
  std::optional<Eigen::MatrixXd> support_rows;
  std::optional<Eigen::MatrixXd> sigma;
};

struct ConditionReport {
  std::string family;
  long n = 0;
  long p = 0;
  long q = 0;
  long s0 = 0;
  double tau = 0.0;
  double epsilon_n = 0.0;
  double a_n = 0.0;
  double u = 0.0;
  double m0 = 0.0;
  TailCheck tail;
  FloorCheck floor;
  double floor_ceiling = 10.0;
  bool floor_pass = false;
  std::optional<AssumptionFlags> assumptions;
  std::optional<double> l_n;
  std::optional<double> c0;
  /// min over support rows of ||B0_j Sigma^{-1/2}|| / eps_n; set when support rows are given.
  std::optional<double> min_signal_ratio;
  std::vector<std::string> notes;

  /// Flat `key = value` lines in a fixed order.
  std::string to_key_value() const;
  /// Two-line CSV (header, values) with the same keys.
  std::string to_csv() const;
};

ConditionReport build_condition_report(const ConditionInputs& in);

}  // namespace embsp
