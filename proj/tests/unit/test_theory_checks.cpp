#include <cmath>
#include <numbers>

#include "doctest.h"
#include "embsp/errors.hpp"
#include "embsp/experiments.hpp"
#include "embsp/theory_checks.hpp"
#include "oracles.hpp"

using namespace embsp;
using Eigen::MatrixXd;

TEST_CASE("contraction rate") {
  CHECK(contraction_rate(100, 1000, 3, 5) == doctest::Approx(0.8311).epsilon(1e-4));
  const double a = std::sqrt(5 * std::log(1000.0) / 100), b = std::sqrt(9 * std::log(100.0) / 100),
               c = std::sqrt(15 * std::log(100.0) / 100);
  CHECK(a == doctest::Approx(0.5877).epsilon(1e-3));
  CHECK(b == doctest::Approx(0.6438).epsilon(1e-3));
  CHECK(c == doctest::Approx(0.8311).epsilon(1e-3));
  // q = 1 with s0 ln p dominating reduces to the univariate rate.
  CHECK(contraction_rate(100, 100000, 1, 1) == doctest::Approx(std::sqrt(std::log(100000.0) / 100)));
  // n -> 4n halves each term (log n fixed by holding the log n terms subdominant).
  CHECK(contraction_rate(400, 1000000, 1, 1) == doctest::Approx(0.5 * contraction_rate(100, 1000000, 1, 1)));
  CHECK_THROWS_AS(contraction_rate(1, 10, 1, 1), DomainError);
  CHECK_THROWS_AS(contraction_rate(10, 1, 1, 1), DomainError);
}

TEST_CASE("tail mass against 40-digit quadrature") {
  CHECK(check_tail_condition(MixingFamily::horseshoe(), 1e-3, 1, 0.1, 10, 0.5).mass ==
        doctest::Approx(0.15178173758657192).epsilon(1e-7));
  CHECK(check_tail_condition(MixingFamily::horseshoe(), 1e-2, 3, 0.5, 10, 0.5).mass ==
        doctest::Approx(0.19362804172725269).epsilon(1e-7));
}

TEST_CASE("tail mass agrees with Monte Carlo at three settings") {
  Rng rng(77);
  struct Case {
    double tau, a;
    int q;
  };
  for (const auto& c : {Case{1e-3, 0.1, 1}, Case{1e-2, 0.5, 3}, Case{1e-4, 0.05, 2}}) {
    const auto mc = testing::mc_tail_mass(MixingFamily::horseshoe(), c.tau, c.q, c.a, 1000000, rng);
    const auto qd = check_tail_condition(MixingFamily::horseshoe(), c.tau, c.q, c.a, 100, 0.5);
    CAPTURE(c.tau);
    CHECK(std::abs(mc.mean - qd.mass) < 3.0 * mc.se);
  }
}

TEST_CASE("tail condition verdicts") {
  const double tau_small = check_tail_condition(MixingFamily::horseshoe(), 1e-30, 1, 0.1, 100, 0.5).mass;
  CHECK(tau_small < 1e-12);
  CHECK(check_tail_condition(MixingFamily::horseshoe(), 1e-30, 1, 0.1, 100, 0.5).pass);

  const double a_n = 1e-2;
  const double tau = theoretical_tau_max(a_n, 100, 1.5, 1.0);
  const auto t = check_tail_condition(MixingFamily::horseshoe(), tau, 1, a_n, 100, 0.5);
  CHECK(t.pass);
  CHECK(t.bound == doctest::Approx(std::pow(100.0, -1.5)));
  CHECK(t.pass == (t.mass <= t.bound));

  double prev = 0.0;
  for (double lt = -12; lt <= 0; lt += 1.0) {
    const double m = check_tail_condition(MixingFamily::gdp(1.0, 1.0), std::pow(10.0, lt), 2, 0.1, 100, 0.5).mass;
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("density floor") {
  const auto f = check_density_floor(MixingFamily::horseshoe(), 1e-4, 1, 1.0, 100);
  CHECK(std::isfinite(f.ratio));
  CHECK(f.ratio < 10.0);
  CHECK(f.ratio == doctest::Approx(-f.log_density / std::log(100.0)));
  double prev = std::numeric_limits<double>::infinity();
  for (double tau : {1e-6, 1e-4, 1e-2, 0.5, 1.0}) {
    const double r = check_density_floor(MixingFamily::horseshoe(), tau, 2, 1.0, 100).ratio;
    CHECK(r < prev);
    prev = r;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double m0 : {1.0, 10.0, 100.0, 1e3, 1e4}) {
    const double lg = check_density_floor(MixingFamily::student_t(1.0), 0.1, 1, m0, 100).log_density;
    CHECK(lg < prev);
    prev = lg;
  }
  CHECK(prev < -15.0);
}

TEST_CASE("assumption flags") {
  ExperimentConfig cfg = ExperimentConfig::standard(4);
  Rng rng(4);
  const auto ds = generate_synthetic(cfg, rng);
  const auto flags = check_assumptions(ds.data, ds.B0, ds.Sigma0, cfg.s0, 50, rng);
  CHECK(flags.A1);
  CHECK(flags.a1_ratio == doctest::Approx(5 * std::log(1000.0) / 100));
  CHECK(flags.sigma_eigen_min >= 2.0 * 0.5 / 1.5 - 1e-12);
  CHECK(flags.sigma_eigen_max <= 2.0 * 1.5 / 0.5 + 1e-12);
  CHECK(flags.A3_3);
  CHECK(flags.subsets_checked == 51);
  CHECK_FALSE(flags.A2_1);  // Gaussian design exceeds 1 in magnitude

  // Orthonormal columns padded with zero rows: X_S'X_S = I so lambda_min / n = 1 / n.
  const long n = 12, p = 5;
  MatrixXd X = MatrixXd::Zero(n, p);
  X.topRows(p) = MatrixXd::Identity(p, p);
  MatrixXd B0 = MatrixXd::Zero(p, 2);
  B0(1, 0) = 1.0;
  const RegressionData d(X, MatrixXd::Zero(n, 2));
  const auto f2 = check_assumptions(d, B0, MatrixXd::Identity(2, 2), 1, 20, rng);
  CHECK(f2.min_subset_eigen == doctest::Approx(1.0 / n).epsilon(1e-12));
  CHECK(f2.A2_1);
  CHECK(f2.A2_3);
}

TEST_CASE("Experiment Sigma0 eigenvalue range") {
  const MatrixXd S = ar1_matrix(3, 0.5, 2.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  CHECK(es.eigenvalues().minCoeff() >= 0.667 - 1e-3);
  CHECK(es.eigenvalues().maxCoeff() <= 6.0);
}

TEST_CASE("volume integral closed form") {
  CHECK(volume_integral(2, 2.0, 1.0) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(volume_integral(1, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(volume_integral(3, 1.5, 2.5) == doctest::Approx(volume_integral(3, 1.5, 1.0) * std::pow(2.5, -1.5)).epsilon(1e-14));
  for (int d : {1, 2, 3, 5}) {
    for (double k : {1.0, 2.0}) {
      for (double a : {0.5, 1.0, 2.0}) {
        CHECK(volume_integral(d, k, a) == doctest::Approx(testing::radial_volume_quadrature(d, k, a)).epsilon(1e-6));
      }
    }
  }
  CHECK_THROWS_AS(volume_integral(0, 1.0, 1.0), DomainError);
}

TEST_CASE("flatness l_n") {
  MatrixXd rows(1, 1);
  rows << 2.0;
  const MatrixXd I1 = MatrixXd::Identity(1, 1);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.1, 1e-2, 1e-4, 1e-6}) {
    const double l = flatness_ln(MixingFamily::horseshoe(), 0.5, 1, rows, I1, 1.0, eps);
    CHECK(l >= 1.0);
    CHECK(l <= prev);
    prev = l;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-4));
  rows << 0.0;
  CHECK(std::isinf(flatness_ln(MixingFamily::horseshoe(), 0.5, 1, rows, I1, 1.0, 0.1)));
}

TEST_CASE("Lemma 2 norm inequalities on random pairs") {
  Rng r(2);
  for (int t = 0; t < 200; ++t) {
    const int m = 1 + static_cast<int>(r.uniform() * 20), k = 1 + static_cast<int>(r.uniform() * 20),
              l = 1 + static_cast<int>(r.uniform() * 20);
    MatrixXd A(m, k), B(k, m), C(k, l);
    for (int i = 0; i < A.size(); ++i) A.data()[i] = r.normal();
    for (int i = 0; i < B.size(); ++i) B.data()[i] = r.normal();
    for (int i = 0; i < C.size(); ++i) C.data()[i] = r.normal();
    CHECK(std::abs((A * B).trace()) <= testing::max_row_norm(A.transpose()) * testing::sum_row_norms(B) + 1e-9);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(C * C.transpose(), Eigen::EigenvaluesOnly);
    CHECK(testing::sum_row_norms(A * C) <= std::sqrt(es.eigenvalues().maxCoeff()) * testing::sum_row_norms(A) + 1e-9);
  }
}

TEST_CASE("condition report") {
  ConditionInputs in;
  in.family = MixingFamily::horseshoe();
  in.n = 50;
  in.p = 100;
  in.q = 3;
  in.s0 = 3;
  in.tau = default_tau(50, 100);
  in.c0 = 1.0;
  const auto rep = build_condition_report(in);
  CHECK(rep.epsilon_n == doctest::Approx(contraction_rate(50, 100, 3, 3)));
  CHECK(rep.a_n == doctest::Approx(rep.epsilon_n / 100));
  CHECK(rep.tail.pass == (rep.tail.mass <= rep.tail.bound));
  CHECK(rep.l_n.has_value());
  const auto kv = rep.to_key_value();
  CHECK(kv.find("tail_mass = ") != std::string::npos);
  CHECK(kv.find("floor_ratio = ") != std::string::npos);
  CHECK(kv.find("l_n = ") != std::string::npos);
  const auto csv = rep.to_csv();
  const auto nl = csv.find('\n');
  CHECK(std::count(csv.begin(), csv.begin() + nl, ',') == std::count(csv.begin() + nl + 1, csv.end(), ','));
}
