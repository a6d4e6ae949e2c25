#include "embsp/theory_checks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "embsp/errors.hpp"
#include "embsp/quadrature.hpp"
#include "embsp/selection.hpp"

namespace embsp {
namespace {

constexpr double kTailTol = 1e-8;

double log_gamma_q(double s, double x) {
  if (x <= 0.0) return 0.0;
  const double qv = boost::math::gamma_q(s, x);
  if (qv > 0.0) return std::log(qv);
  return (s - 1.0) * std::log(x) - x - boost::math::lgamma(s);
}

double min_eigen_over_n(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd xs(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) xs.col(static_cast<Eigen::Index>(c)) = X.col(cols[c]);
  const Eigen::MatrixXd g = xs.transpose() * xs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() / static_cast<double>(X.rows());
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string fmt(bool v) { return v ? "true" : "false"; }

}  // namespace

double contraction_rate(long n, long p, long q, long s0) {
  if (n < 2 || p < 2 || q < 1 || s0 < 1) throw DomainError("contraction_rate requires n, p >= 2 and q, s0 >= 1");
  const double nd = static_cast<double>(n);
  const double ln_n = std::log(nd);
  const double ln_p = std::log(static_cast<double>(p));
  const double qd = static_cast<double>(q);
  const double sd = static_cast<double>(s0);
  return std::max({std::sqrt(sd * ln_p / nd), std::sqrt(qd * qd * ln_n / nd), std::sqrt(qd * sd * ln_n / nd)});
}

TailCheck check_tail_condition(const MixingFamily& family, double tau, int q, double a_n, long p, double u) {
  if (!(tau > 0.0) || q < 1 || !(a_n > 0.0) || p < 1 || !(u > 0.0)) {
    throw DomainError("check_tail_condition requires positive tau, q, a_n, p, u");
  }
  const double log_z = std::log(mixing_normalizer(family));
  const double s = 0.5 * q;
  const double c = a_n * a_n / (2.0 * tau);
  auto log_f = [&](double t) {
    return log_unnormalized_mixing_density(family, t) - log_z + t + log_gamma_q(s, c * std::exp(-t));
  };
  TailCheck out;
  out.mass = std::exp(integrate_exp_over_line(log_f, kTailTol).log_value);
  out.bound = std::pow(static_cast<double>(p), -(1.0 + u));
  out.pass = out.mass <= out.bound;
  return out;
}

FloorCheck check_density_floor(const MixingFamily& family, double tau, int q, double m0, long p) {
  if (!(m0 > 0.0)) throw DomainError("check_density_floor requires M0 > 0");
  if (p < 2) throw DomainError("check_density_floor requires p >= 2");
  FloorCheck out;
  out.log_density = log_marginal_prior_density(family, tau, q, m0);
  out.ratio = -out.log_density / std::log(static_cast<double>(p));
  return out;
}

AssumptionFlags check_assumptions(const RegressionData& data, const Eigen::MatrixXd& B0, const Eigen::MatrixXd& Sigma0,
                                  long s0, long subset_budget, Rng& rng, double a3_1_tolerance) {
  if (B0.rows() != data.p() || B0.cols() != data.q() || Sigma0.rows() != data.q() || Sigma0.cols() != data.q()) {
    throw ConfigError("check_assumptions: B0 must be p x q and Sigma0 q x q");
  }
  const double n = static_cast<double>(data.n());
  const double ln_n = std::log(n);
  const double ln_p = std::log(static_cast<double>(data.p()));
  const double q = static_cast<double>(data.q());
  AssumptionFlags f;

  f.a1_ratio = static_cast<double>(s0) * ln_p / n;
  f.A1 = f.a1_ratio < 1.0;

  f.max_abs_x = data.X().cwiseAbs().maxCoeff();
  f.A2_1 = f.max_abs_x <= 1.0;

  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < B0.rows(); ++j) {
    if ((B0.row(j).array() != 0.0).any()) support.push_back(j);
  }
  double min_eig = std::numeric_limits<double>::infinity();
  if (!support.empty()) {
    min_eig = min_eigen_over_n(data.X(), support);
    ++f.subsets_checked;
  }
  const long max_size = std::min<long>(std::max<long>(2 * s0, 1), static_cast<long>(data.p()));
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(data.p()));
  for (long b = 0; b < subset_budget; ++b) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    const long size = 1 + static_cast<long>(std::floor(rng.uniform() * static_cast<double>(max_size)));
    for (long i = 0; i < size; ++i) {
      const auto span = static_cast<double>(perm.size() - static_cast<std::size_t>(i));
      const auto k = static_cast<std::size_t>(i) + static_cast<std::size_t>(std::floor(rng.uniform() * span));
      std::swap(perm[static_cast<std::size_t>(i)], perm[std::min(k, perm.size() - 1)]);
    }
    std::vector<Eigen::Index> cols(perm.begin(), perm.begin() + size);
    min_eig = std::min(min_eig, min_eigen_over_n(data.X(), cols));
    ++f.subsets_checked;
  }
  f.min_subset_eigen = std::isfinite(min_eig) ? min_eig : 0.0;
  f.A2_3 = f.subsets_checked > 0 && f.min_subset_eigen > 1e-12;

  f.a3_1_ratio = q / ln_p;
  f.A3_1 = q <= ln_p * (1.0 + a3_1_tolerance);
  f.a3_2_ratio = q * q * ln_n / n;
  f.A3_2 = f.a3_2_ratio < 1.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Sigma0 + Sigma0.transpose()), Eigen::EigenvaluesOnly);
  f.sigma_eigen_min = es.eigenvalues().minCoeff();
  f.sigma_eigen_max = es.eigenvalues().maxCoeff();
  f.A3_3 = f.sigma_eigen_min > 0.0 && std::isfinite(f.sigma_eigen_max);
  return f;
}

double volume_integral(int d, double k, double a) {
  if (d < 1 || !(k > 0.0) || !(a > 0.0)) throw DomainError("volume_integral requires d >= 1, k > 0, a > 0");
  const double half_d = 0.5 * d;
  return 2.0 * std::pow(std::numbers::pi, half_d) * std::pow(a, -k) / (k * boost::math::tgamma(half_d));
}

double flatness_ln(const MixingFamily& family, double tau, int q, const Eigen::MatrixXd& B0_rows,
                   const Eigen::MatrixXd& Sigma, double c0, double epsilon_n) {
  if (!(c0 > 0.0) || !(epsilon_n > 0.0)) throw DomainError("flatness_ln requires c0 > 0 and eps_n > 0");
  if (B0_rows.rows() == 0) throw DomainError("flatness_ln requires at least one support row");
  const Eigen::VectorXd centres = row_scores(B0_rows, Sigma);
  const double radius = c0 * epsilon_n;
  double worst = 1.0;
  for (Eigen::Index j = 0; j < centres.size(); ++j) {
    const double near = std::max(0.0, centres(j) - radius);
    const double far = centres(j) + radius;
    const double log_near = log_marginal_prior_density(family, tau, q, near);
    if (std::isinf(log_near)) return std::numeric_limits<double>::infinity();
    const double log_far = log_marginal_prior_density(family, tau, q, far);
    worst = std::max(worst, std::exp(log_near - log_far));
  }
  return worst;
}

ConditionReport build_condition_report(const ConditionInputs& in) {
  ConditionReport r;
  r.family = in.family.to_string();
  r.n = in.n;
  r.p = in.p;
  r.q = in.q;
  r.s0 = in.s0;
  r.tau = in.tau;
  r.u = in.u;
  r.m0 = in.m0;
  r.epsilon_n = contraction_rate(in.n, in.p, in.q, in.s0);
  r.a_n = in.a_n ? *in.a_n : r.epsilon_n / static_cast<double>(in.p);
  r.tail = check_tail_condition(in.family, in.tau, static_cast<int>(in.q), r.a_n, in.p, in.u);
  r.floor = check_density_floor(in.family, in.tau, static_cast<int>(in.q), in.m0, in.p);
  r.floor_ceiling = in.floor_ceiling;
  r.floor_pass = std::isfinite(r.floor.ratio) && r.floor.ratio <= in.floor_ceiling;
  if (in.support_rows && in.support_rows->rows() > 0) {
    const Eigen::MatrixXd sigma = in.sigma ? *in.sigma : Eigen::MatrixXd::Identity(in.q, in.q);
    r.min_signal_ratio = row_scores(*in.support_rows, sigma).minCoeff() / r.epsilon_n;
  }
  if (in.c0) {
    r.c0 = in.c0;
    const Eigen::MatrixXd sigma = in.sigma ? *in.sigma : Eigen::MatrixXd::Identity(in.q, in.q);
    Eigen::MatrixXd rows;
    if (in.support_rows) {
      rows = *in.support_rows;
    } else {
      rows = Eigen::MatrixXd::Zero(1, in.q);
      rows(0, 0) = in.m0;
      rows = rows * Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL().transpose();
    }
    r.l_n = flatness_ln(in.family, in.tau, static_cast<int>(in.q), rows, sigma, *in.c0, r.epsilon_n);
  }
  r.notes.push_back("constants behind the order relations are unspecified; floor_ratio is compared to a ceiling");
  if (in.family.kind() == FamilyKind::HIB) {
    r.notes.push_back("HIB tail constant K fixed by matching the mixing density at xi = 1");
  }
  return r;
}

namespace {

std::vector<std::pair<std::string, std::string>> report_fields(const ConditionReport& r) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"family", r.family},
      {"n", std::to_string(r.n)},
      {"p", std::to_string(r.p)},
      {"q", std::to_string(r.q)},
      {"s0", std::to_string(r.s0)},
      {"tau", fmt(r.tau)},
      {"epsilon_n", fmt(r.epsilon_n)},
      {"a_n", fmt(r.a_n)},
      {"u", fmt(r.u)},
      {"tail_mass", fmt(r.tail.mass)},
      {"tail_bound", fmt(r.tail.bound)},
      {"tail_pass", fmt(r.tail.pass)},
      {"m0", fmt(r.m0)},
      {"floor_log_density", fmt(r.floor.log_density)},
      {"floor_ratio", fmt(r.floor.ratio)},
      {"floor_ceiling", fmt(r.floor_ceiling)},
      {"floor_pass", fmt(r.floor_pass)},
  };
  if (r.assumptions) {
    const auto& a = *r.assumptions;
    kv.insert(kv.end(), {
                            {"A1", fmt(a.A1)},
                            {"A1_ratio", fmt(a.a1_ratio)},
                            {"A2_1", fmt(a.A2_1)},
                            {"A2_1_max_abs_x", fmt(a.max_abs_x)},
                            {"A2_3", fmt(a.A2_3)},
                            {"A2_3_min_eigen_over_n", fmt(a.min_subset_eigen)},
                            {"A2_3_subsets", std::to_string(a.subsets_checked)},
                            {"A3_1", fmt(a.A3_1)},
                            {"A3_1_ratio", fmt(a.a3_1_ratio)},
                            {"A3_2", fmt(a.A3_2)},
                            {"A3_2_ratio", fmt(a.a3_2_ratio)},
                            {"A3_3", fmt(a.A3_3)},
                            {"A3_3_sigma_eigen_min", fmt(a.sigma_eigen_min)},
                            {"A3_3_sigma_eigen_max", fmt(a.sigma_eigen_max)},
                        });
  }
  if (r.c0) kv.emplace_back("c0", fmt(*r.c0));
  if (r.l_n) kv.emplace_back("l_n", fmt(*r.l_n));
  if (r.min_signal_ratio) kv.emplace_back("min_signal_over_epsilon", fmt(*r.min_signal_ratio));
  return kv;
}

}  // namespace

std::string ConditionReport::to_key_value() const {
  std::ostringstream os;
  for (const auto& [k, v] : report_fields(*this)) os << k << " = " << v << '\n';
  for (const auto& note : notes) os << "# " << note << '\n';
  return os.str();
}

std::string ConditionReport::to_csv() const {
  const auto kv = report_fields(*this);
  std::ostringstream head;
  std::ostringstream vals;
  for (std::size_t i = 0; i < kv.size(); ++i) {
    if (i) {
      head << ',';
      vals << ',';
    }
    head << kv[i].first;
    vals << kv[i].second;
  }
  return head.str() + '\n' + vals.str() + '\n';
}

}  // namespace embsp
