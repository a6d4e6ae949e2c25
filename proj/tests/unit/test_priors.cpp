#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "embsp/errors.hpp"
#include "embsp/priors.hpp"
#include "embsp/rng.hpp"
#include "oracles.hpp"

using namespace embsp;

namespace {

std::vector<MixingFamily> families_three_settings() {
  return {
      MixingFamily::student_t(0.5),       MixingFamily::student_t(1.0),        MixingFamily::student_t(3.0),
      MixingFamily::tpbn(0.5, 0.5),       MixingFamily::tpbn(1.5, 0.3),        MixingFamily::tpbn(0.2, 2.0),
      MixingFamily::horseshoe(),          MixingFamily::neg(0.5),              MixingFamily::neg(1.0),
      MixingFamily::neg(3.0),             MixingFamily::gdp(1.0, 1.0),         MixingFamily::gdp(0.5, 2.0),
      MixingFamily::gdp(2.0, 0.5),        MixingFamily::hib(0.5, 0.5, 1.0, 2.0), MixingFamily::hib(1.0, 1.0, 0.5, 0.5),
      MixingFamily::hib(0.5, 2.0, 0.0, 1.0), MixingFamily::horseshoe_plus(),
  };
}

// Independent check of the total mass: Boost double-exponential rules directly in xi.
double mass_in_xi(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  return ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, std::numeric_limits<double>::infinity());
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  return g;
}

}  // namespace

TEST_CASE("Horseshoe density at xi = 1 is 1 / (2 pi)") {
  CHECK(mixing_density(MixingFamily::horseshoe(), 1.0) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(mixing_density(MixingFamily::horseshoe(), 1.0) == doctest::Approx(0.1591549).epsilon(1e-6));
}

TEST_CASE("every family integrates to one") {
  for (const auto& f : families_three_settings()) {
    CAPTURE(f.to_string());
    CHECK(mass_in_xi([&](double x) { return mixing_density(f, x); }) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("normalizers against closed forms and 40-digit quadrature") {
  CHECK(mixing_normalizer(MixingFamily::horseshoe()) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(mixing_normalizer(MixingFamily::student_t(3.0)) ==
        doctest::Approx(std::tgamma(3.0) / std::pow(3.0, 3.0)).epsilon(1e-14));
  CHECK(mixing_normalizer(MixingFamily::tpbn(1.5, 0.3)) ==
        doctest::Approx(boost::math::beta(1.5, 0.3)).epsilon(1e-14));
  CHECK(mixing_normalizer(MixingFamily::neg(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  // GDP: int pi = Gamma(2a) / eta^{2a}; Horseshoe+: pi^2.
  CHECK(mixing_normalizer(MixingFamily::gdp(1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mixing_normalizer(MixingFamily::gdp(0.5, 2.0)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(mixing_normalizer(MixingFamily::gdp(2.0, 0.5)) == doctest::Approx(6.0 * 16.0).epsilon(1e-10));
  CHECK(mixing_normalizer(MixingFamily::horseshoe_plus()) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-10));
  CHECK(mixing_normalizer(MixingFamily::hib(0.5, 0.5, 1.0, 2.0)) == doctest::Approx(1.3161672949334969).epsilon(1e-10));
  CHECK(mixing_normalizer(MixingFamily::hib(1.0, 1.0, 0.5, 0.5)) == doctest::Approx(1.1224153467919095).epsilon(1e-10));
  CHECK(mixing_normalizer(MixingFamily::hib(0.5, 2.0, -1.0, 1.0)) == doctest::Approx(3.030078469278705).epsilon(1e-10));
}

TEST_CASE("GDP unnormalized density against 40-digit quadrature") {
  CHECK(unnormalized_mixing_density(MixingFamily::gdp(1.0, 1.0), 2.0) ==
        doctest::Approx(0.073781904665291919).epsilon(1e-10));
  CHECK(unnormalized_mixing_density(MixingFamily::gdp(0.5, 2.0), 0.3) ==
        doctest::Approx(0.087965117114564342).epsilon(1e-10));
}

TEST_CASE("aliases agree with the TPBN form") {
  for (double xi : {1e-4, 0.3, 1.0, 3.0, 250.0}) {
    CHECK(unnormalized_mixing_density(MixingFamily::neg(1.0), xi) ==
          doctest::Approx(unnormalized_mixing_density(MixingFamily::tpbn(1.0, 1.0), xi)).epsilon(1e-12));
    CHECK(unnormalized_mixing_density(MixingFamily::horseshoe(), xi) ==
          doctest::Approx(unnormalized_mixing_density(MixingFamily::tpbn(0.5, 0.5), xi)).epsilon(1e-12));
    CHECK(mixing_density(MixingFamily::neg(2.5), xi) ==
          doctest::Approx(mixing_density(MixingFamily::tpbn(1.0, 2.5), xi)).epsilon(1e-12));
  }
  CHECK(mixing_density(MixingFamily::neg(1.0), 3.0) ==
        doctest::Approx(mixing_density(MixingFamily::tpbn(1.0, 1.0), 3.0)).epsilon(1e-12));
  // HIB with s = 0, phi2 = 1 is TPBN.
  CHECK(mixing_density(MixingFamily::hib(0.7, 1.3, 0.0, 1.0), 2.0) ==
        doctest::Approx(mixing_density(MixingFamily::tpbn(0.7, 1.3), 2.0)).epsilon(1e-9));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(mixing_density(MixingFamily::horseshoe(), 0.0), DomainError);
  CHECK_THROWS_AS(mixing_density(MixingFamily::horseshoe(), -1.0), DomainError);
  CHECK_THROWS_AS(tail_decomposition(MixingFamily::horseshoe(), 0.0), DomainError);
  CHECK_THROWS_AS(MixingFamily::student_t(0.0), DomainError);
  CHECK_THROWS_AS(MixingFamily::tpbn(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(MixingFamily::gdp(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(MixingFamily::hib(1.0, 1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("tail decomposition examples") {
  const auto hs = tail_decomposition(MixingFamily::horseshoe(), 2.0);
  CHECK(hs.r == 1.5);
  CHECK(hs.L == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  const auto tp = tail_decomposition(MixingFamily::tpbn(0.7, 1.2), 3.0);
  CHECK(tp.r == doctest::Approx(2.2));
  CHECK(tp.L == doctest::Approx(std::pow(0.75, 1.9)).epsilon(1e-14));

  const auto hp = tail_decomposition(MixingFamily::horseshoe_plus(), 16.0);
  CHECK(hp.r == 1.25);
  CHECK(hp.L == doctest::Approx(std::pow(16.0, 0.75) * std::log(16.0) / (15.0 * 4.0)).epsilon(1e-14));
  CHECK(hp.L == doctest::Approx(0.36968).epsilon(1e-5));

  CHECK(tail_exponent(MixingFamily::student_t(2.0)) == 3.0);
  CHECK(tail_exponent(MixingFamily::neg(2.0)) == 3.0);
  CHECK(tail_exponent(MixingFamily::gdp(0.5, 1.0)) == 1.5);
  CHECK(tail_exponent(MixingFamily::hib(0.5, 0.8, 0.0, 1.0)) == doctest::Approx(1.8));
  for (const auto& f : families_three_settings()) CHECK(tail_exponent(f) > 1.0);
}

TEST_CASE("K xi^{-r} L(xi) reproduces the unnormalized density") {
  for (const auto& f : families_three_settings()) {
    const double K = tail_constant(f);
    for (double xi : log_grid(1e-6, 1e6, 200)) {
      if (f.kind() == FamilyKind::HorseshoePlus && xi < 1.0 + 1e-9) continue;
      const auto d = tail_decomposition(f, xi);
      CAPTURE(f.to_string());
      CAPTURE(xi);
      CHECK(K * std::pow(xi, -d.r) * d.L == doctest::Approx(unnormalized_mixing_density(f, xi)).epsilon(1e-10));
    }
  }
  // Removable singularity of the Horseshoe+ at xi = 1.
  CHECK(tail_decomposition(MixingFamily::horseshoe_plus(), 1.0).L == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(unnormalized_mixing_density(MixingFamily::horseshoe_plus(), 1.0 + 1e-12) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("slowly varying bounds examples") {
  const auto hs = slowly_varying_bounds(MixingFamily::horseshoe(), 2.0);
  CHECK(hs.lower == doctest::Approx(0.5));
  CHECK(hs.upper == doctest::Approx(1.0));
  const auto st = slowly_varying_bounds(MixingFamily::student_t(1.0), 10.0);
  CHECK(st.lower == doctest::Approx(0.9));
  CHECK(st.upper == doctest::Approx(1.0));
  CHECK(tail_decomposition(MixingFamily::student_t(1.0), 10.0).L == doctest::Approx(std::exp(-0.1)).epsilon(1e-14));
  const auto hp = slowly_varying_bounds(MixingFamily::horseshoe_plus(), 16.0);
  CHECK(hp.lower == doctest::Approx(0.125));
  CHECK(hp.upper == doctest::Approx(1.0));
}

TEST_CASE("L(xi) lies within its bounds on a log grid") {
  for (const auto& f : families_three_settings()) {
    std::vector<double> grid = f.kind() == FamilyKind::HorseshoePlus ? log_grid(1.0 + 1e-9, 1e6, 200)
                                                                       : log_grid(1e-6, 1e6, 200);
    if (f.kind() == FamilyKind::HorseshoePlus) grid.push_back(1.0);
    for (double xi : grid) {
      const auto b = slowly_varying_bounds(f, xi);
      const double L = tail_decomposition(f, xi).L;
      CAPTURE(f.to_string());
      CAPTURE(xi);
      CHECK(b.lower <= L);
      CHECK(L <= b.upper);
    }
  }
}

TEST_CASE("marginal prior density against 40-digit quadrature") {
  CHECK(*marginal_prior_density(MixingFamily::horseshoe(), 1.0, 1, 1.0) == doctest::Approx(0.1171979033975241).epsilon(1e-8));
  CHECK(*marginal_prior_density(MixingFamily::horseshoe(), 0.1, 3, 0.5) == doctest::Approx(0.1846837774257493).epsilon(1e-8));
  CHECK(*marginal_prior_density(MixingFamily::horseshoe_plus(), 1.0, 2, 1.0) ==
        doctest::Approx(0.030374494076136431).epsilon(1e-8));
  CHECK(*marginal_prior_density(MixingFamily::hib(0.5, 0.5, 1.0, 2.0), 1.0, 1, 2.0) ==
        doctest::Approx(0.049449080068028574).epsilon(1e-8));
}

TEST_CASE("Student-t mixing gives a multivariate t marginal") {
  // xi ~ InvGamma(a, a) makes x a q-variate t with 2a degrees of freedom and scale sqrt(tau).
  const double a = 1.5, tau = 0.7;
  for (int q : {1, 3}) {
    for (double r : {0.0, 0.4, 2.0, 9.0}) {
      const double nu = 2.0 * a;
      const double log_t = std::lgamma(0.5 * (nu + q)) - std::lgamma(0.5 * nu) - 0.5 * q * std::log(nu * std::numbers::pi * tau) -
                           0.5 * (nu + q) * std::log1p(r * r / (nu * tau));
      CAPTURE(q);
      CAPTURE(r);
      CHECK(log_marginal_prior_density(MixingFamily::student_t(a), tau, q, r) == doctest::Approx(log_t).epsilon(1e-9));
    }
  }
}

TEST_CASE("marginal density diverges at the origin only for non-integrable poles") {
  CHECK_FALSE(marginal_prior_density(MixingFamily::horseshoe(), 1.0, 1, 0.0).has_value());
  CHECK_FALSE(marginal_prior_density(MixingFamily::horseshoe_plus(), 1.0, 1, 0.0).has_value());
  CHECK_FALSE(marginal_prior_density(MixingFamily::neg(1.0), 1.0, 2, 0.0).has_value());
  CHECK(marginal_prior_density(MixingFamily::neg(1.0), 1.0, 1, 0.0).has_value());
  CHECK(marginal_prior_density(MixingFamily::student_t(1.0), 1.0, 3, 0.0).has_value());
  CHECK(marginal_prior_density(MixingFamily::tpbn(2.0, 0.5), 1.0, 2, 0.0).has_value());
}

TEST_CASE("marginal density is non-increasing in the radius") {
  for (const auto& f : {MixingFamily::horseshoe(), MixingFamily::gdp(1.0, 1.0), MixingFamily::hib(0.5, 0.5, 1.0, 2.0),
                        MixingFamily::horseshoe_plus(), MixingFamily::student_t(2.0)}) {
    for (int q : {1, 3}) {
      double prev = std::numeric_limits<double>::infinity();
      for (int i = 1; i <= 50; ++i) {
        const double r = 0.05 * std::pow(1.2, i);
        const double g = log_marginal_prior_density(f, 0.5, q, r);
        CAPTURE(f.to_string());
        CAPTURE(r);
        CHECK(g <= prev);
        prev = g;
      }
    }
  }
}

TEST_CASE("Monte Carlo g_tau agrees with quadrature at five radii") {
  Rng rng(2024);
  for (const auto& f : {MixingFamily::horseshoe(), MixingFamily::gdp(1.0, 1.0), MixingFamily::horseshoe_plus()}) {
    for (double r : {0.3, 0.7, 1.0, 2.0, 4.0}) {
      const auto mc = testing::mc_marginal_density(f, 1.0, 1, r, 200000, rng);
      const double quad = *marginal_prior_density(f, 1.0, 1, r);
      CAPTURE(f.to_string());
      CAPTURE(r);
      CHECK(std::abs(mc.mean - quad) < 3.5 * mc.se);
    }
  }
  const auto mc = testing::mc_marginal_density(MixingFamily::horseshoe(), 1.0, 1, 1.0, 1000000, rng);
  CHECK(std::abs(mc.mean - *marginal_prior_density(MixingFamily::horseshoe(), 1.0, 1, 1.0)) < 3.0 * mc.se);
}

TEST_CASE("prior draws follow the mixing density") {
  for (const auto& f : families_three_settings()) {
    testing::NumericCdf cdf([&](double x) { return unnormalized_mixing_density(f, x); }, -40.0, 40.0, 800);
    Rng rng(99, static_cast<std::uint64_t>(f.to_string().size()));
    std::vector<double> v(10000);
    for (auto& x : v) x = draw_mixing(f, rng);
    CAPTURE(f.to_string());
    CHECK(testing::ks_statistic(v, cdf) < 0.02);
  }
}

TEST_CASE("global scale recommendations") {
  CHECK(default_tau(100, 1000) == doctest::Approx(4.6599e-5).epsilon(1e-4));
  CHECK(default_tau(25, 125) == doctest::Approx(8.918e-4).epsilon(1e-3));
  CHECK(default_tau(25, 126) < default_tau(25, 125));
  CHECK_THROWS_AS(default_tau(1, 10), DomainError);

  CHECK(theoretical_tau_max(1e-3, 100, 1.5, 1.0) == doctest::Approx(1e-14).epsilon(1e-12));
  CHECK(theoretical_tau_max(1.0, 1, 2.7, 0.3) == 1.0);
  CHECK(theoretical_tau_max(1e-2, 50, 1.5, 2.0) < theoretical_tau_max(1e-2, 50, 1.5, 1.0));
  CHECK_THROWS_AS(theoretical_tau_max(1e-2, 50, 1.0, 1.0), DomainError);

  CHECK(GlobalScale::automatic().resolve(25, 125) == default_tau(25, 125));
  CHECK(GlobalScale::fixed(0.3).resolve(25, 125) == 0.3);
  CHECK_THROWS_AS(GlobalScale::fixed(0.0), DomainError);
}

TEST_CASE("family strings parse and round-trip") {
  CHECK(parse_family("horseshoe").kind() == FamilyKind::Horseshoe);
  CHECK(parse_family("horseshoe-plus").kind() == FamilyKind::HorseshoePlus);
  const auto t = parse_family("tpbn:u=0.25,a=2");
  CHECK(t.kind() == FamilyKind::TPBN);
  CHECK(t.u() == 0.25);
  CHECK(t.a() == 2.0);
  CHECK(parse_family("tpbn").u() == 0.5);
  CHECK(parse_family("neg:a=1").a() == 1.0);
  CHECK(parse_family("student-t:a=3").a() == 3.0);
  const auto g = parse_family("gdp:a=1,eta=2");
  CHECK(g.eta() == 2.0);
  const auto h = parse_family("hib:u=0.5,a=0.5,s=-1,phi2=2");
  CHECK(h.s() == -1.0);
  CHECK(h.phi2() == 2.0);
  CHECK(parse_family(h.to_string()).to_string() == h.to_string());
  CHECK_THROWS_AS(parse_family("tpbn:b=1"), ParseError);
  CHECK_THROWS_AS(parse_family("laplace"), ParseError);
  CHECK_THROWS_AS(parse_family("neg:a=abc"), ParseError);
  CHECK_THROWS_AS(parse_family("neg:a=-1"), ParseError);
  try {
    parse_family("gdp:b=1");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("a") != std::string::npos);
    CHECK(msg.find("eta") != std::string::npos);
  }
}

TEST_CASE("normalizer is shared safely across threads") {
  const auto f = MixingFamily::hib(0.3, 0.9, 0.2, 1.7);
  std::vector<double> got(8);
  std::vector<std::thread> th;
  for (int i = 0; i < 8; ++i) th.emplace_back([&, i] { got[i] = mixing_normalizer(f); });
  for (auto& t : th) t.join();
  for (double v : got) CHECK(v == got[0]);
}
