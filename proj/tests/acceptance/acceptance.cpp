// Acceptance runner: `acceptance AC<k>` evaluates one criterion and prints a
// single PASS/FAIL line. Exit status 0 means PASS.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/special_functions/gamma.hpp>

#include "embsp/errors.hpp"
#include "embsp/experiments.hpp"
#include "embsp/getting_it_right.hpp"
#include "embsp/priors.hpp"
#include "embsp/sampler.hpp"
#include "embsp/theory_checks.hpp"
#include "oracles.hpp"

using namespace embsp;
using Eigen::Index;
using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

MatrixXd gaussian(Index rows, Index cols, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Outcome ac1() {
  auto cfg = GirConfig::standard(15, 8, 2);
  cfg.samples = 20000;
  cfg.seed = 2024;
  const auto ok = getting_it_right(cfg);
  std::string names;
  for (const auto& s : ok.statistics) names += s.name + "=" + fmt(s.z) + " ";
  cfg.sigma_df_offset = 8.0;
  const auto bad = getting_it_right(cfg);
  const bool pass = ok.statistics.size() == 5 && ok.max_abs_z() < 4.0 && bad.max_abs_z() > 6.0;
  return {pass, "z: " + names + "| mutation max|z| = " + fmt(bad.max_abs_z())};
}

Outcome ac2() {
  Rng rng(31337, 0);
  bool pass = true;
  double worst = 0.0;
  long components = 0;
  for (int inst = 0; inst < 5; ++inst) {
    const Index n = 5 + static_cast<Index>(rng.uniform() * 16);
    const Index p = 2 + static_cast<Index>(rng.uniform() * 9);
    const Index q = 1 + static_cast<Index>(rng.uniform() * 3);
    const MatrixXd X = gaussian(n, p, rng);
    const MatrixXd Y = X * gaussian(p, q, rng) + gaussian(n, q, rng);
    const RegressionData data(X, Y);
    auto hp = HyperParams::defaults(q);
    hp.tau = GlobalScale::fixed(0.5 + rng.uniform());
    SamplerConfig sc;
    sc.iterations = 21000;
    sc.burn_in = 1000;
    sc.seed = 500 + static_cast<std::uint64_t>(inst);
    sc.fix_xi = 1.0;
    const auto chain = run_chain(data, hp, sc);
    const auto oracle = conjugate_oracle(data, hp, 1.0);
    auto check = [&](const MatrixXd& expected, const std::function<double(const ChainState&, Index)>& get) {
      for (Index c = 0; c < expected.size(); ++c) {
        std::vector<double> v;
        v.reserve(chain.states.size());
        for (const auto& s : chain.states) v.push_back(get(s, c));
        const double mean = testing::mc_summary(v).mean;
        const double z = std::abs(mean - expected.data()[c]) / batch_means_standard_error(v, 50);
        worst = std::max(worst, z);
        ++components;
        if (!(z < 3.0)) pass = false;
      }
    };
    check(oracle.B_mean, [](const ChainState& s, Index c) { return s.B.data()[c]; });
    check(oracle.Sigma_mean, [](const ChainState& s, Index c) { return s.Sigma.data()[c]; });
  }
  return {pass, std::to_string(components) + " components, max |mean - oracle| / SE = " + fmt(worst)};
}

// At most one adjacent increase, and that one no larger than 10% of its predecessor.
bool trend_ok(const std::vector<double>& m, std::string& why) {
  int inversions = 0;
  bool small = true;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    if (m[i + 1] > m[i]) {
      ++inversions;
      if ((m[i + 1] - m[i]) / m[i] > 0.10) small = false;
    }
  }
  why = std::to_string(inversions) + " inversion(s)";
  return inversions == 0 || (inversions == 1 && small);
}

Outcome ac3() {
  SuiteOptions so;
  so.seed = 20260101;
  so.on_record = [](const MetricsRecord& r) {
    std::cerr << "  experiment " << r.experiment << " replicate " << r.replicate << (r.failed ? " FAILED" : "") << '\n';
  };
  const auto res = run_experiment_suite(so);
  std::vector<double> spec, frob;
  long failures = 0;
  for (const auto& m : res.medians) {
    spec.push_back(m.spectral_error);
    frob.push_back(m.frobenius_error);
    failures += m.failures;
  }
  std::string ws, wf;
  const bool spec_ok = trend_ok(spec, ws);
  const bool frob_ok = trend_ok(frob, wf);
  const bool pass = spec.size() == 6 && failures == 0 && spec_ok && frob_ok;
  std::string s = "spectral medians";
  for (double v : spec) s += " " + fmt(v);
  s += " (" + ws + "); frobenius medians";
  for (double v : frob) s += " " + fmt(v);
  s += " (" + wf + "); failed replicates " + std::to_string(failures);
  return {pass, s};
}

Outcome ac4() {
  SuiteOptions so;
  so.ids = {1};
  so.seed = 4242;
  const auto res = run_experiment_suite(so);
  const auto& m = res.medians.at(0);
  long fp = 0, tp = 0;
  for (const auto& r : res.records) {
    fp += r.false_positives;
    tp += r.true_positives;
  }
  const bool pass = m.failures == 0 && m.exact_recovery_rate >= 0.8 && m.zero_fp_rate >= 0.9;
  return {pass, "exact recovery " + fmt(m.exact_recovery_rate) + ", zero-FP rate " + fmt(m.zero_fp_rate) +
                    ", mean TP " + fmt(static_cast<double>(tp) / 20.0) + ", mean FP " +
                    fmt(static_cast<double>(fp) / 20.0)};
}

Outcome ac5() {
  const long p = 100;
  bool pass = true;
  std::string s;
  Rng rng(55, 0);
  for (int q : {1, 3}) {
    // a_n = eps_n / p with eps_n at (n = 50, s0 = 3) and this q.
    const double a = contraction_rate(50, p, q, 3) / static_cast<double>(p);
    const double tau = theoretical_tau_max(a, p, 1.5, 1.0);
    const auto t = check_tail_condition(MixingFamily::horseshoe(), tau, q, a, p, 0.5);
    // Conditional Monte Carlo: E_xi[ P(chi2_q >= a^2 / (tau xi)) ] with xi drawn from the prior.
    std::vector<double> v(4000000);
    for (auto& x : v) {
      const double xi = draw_mixing(MixingFamily::horseshoe(), rng);
      x = boost::math::gamma_q(0.5 * q, a * a / (2.0 * tau * xi));
    }
    const auto mc = testing::mc_summary(v);
    const bool ok = t.mass <= std::pow(100.0, -1.5) && std::abs(mc.mean - t.mass) < 3.0 * mc.se;
    pass = pass && ok;
    s += "q=" + std::to_string(q) + ": mass " + fmt(t.mass) + " (MC " + fmt(mc.mean) + " +- " + fmt(mc.se) +
         ") bound " + fmt(std::pow(100.0, -1.5)) + "; ";
  }
  return {pass, s};
}

Outcome ac6() {
  double worst = 0.0;
  int points = 0;
  for (int d : {1, 2, 3, 5}) {
    for (double k : {1.0, 2.0}) {
      for (double a : {0.5, 1.0, 2.0}) {
        const double exact = volume_integral(d, k, a);
        const double quad = testing::radial_volume_quadrature(d, k, a);
        worst = std::max(worst, std::abs(exact - quad) / std::abs(quad));
        ++points;
      }
    }
  }
  return {points == 24 && worst <= 1e-6, std::to_string(points) + " grid points, max relative error " + fmt(worst)};
}

Outcome ac7() {
  const std::vector<MixingFamily> families = {
      MixingFamily::student_t(0.5),          MixingFamily::student_t(1.0),          MixingFamily::student_t(3.0),
      MixingFamily::tpbn(0.5, 0.5),          MixingFamily::tpbn(1.5, 0.3),          MixingFamily::tpbn(0.2, 2.0),
      MixingFamily::horseshoe(),             MixingFamily::neg(0.5),                MixingFamily::neg(1.0),
      MixingFamily::neg(3.0),                MixingFamily::gdp(1.0, 1.0),           MixingFamily::gdp(0.5, 2.0),
      MixingFamily::gdp(2.0, 0.5),           MixingFamily::hib(0.5, 0.5, 1.0, 2.0), MixingFamily::hib(1.0, 1.0, 0.5, 0.5),
      MixingFamily::hib(0.5, 2.0, 0.0, 1.0), MixingFamily::horseshoe_plus(),
  };
  long checked = 0, violations = 0;
  for (const auto& f : families) {
    // Horseshoe+ bounds are stated for xi >= 1.
    const double lo = f.kind() == FamilyKind::HorseshoePlus ? 1.0 : 1e-6;
    for (int i = 0; i < 200; ++i) {
      const double xi = lo * std::pow(1e6 / lo, i / 199.0);
      const auto b = slowly_varying_bounds(f, xi);
      const double L = tail_decomposition(f, xi).L;
      ++checked;
      if (!(b.lower <= L && L <= b.upper)) ++violations;
    }
  }
  return {violations == 0, std::to_string(families.size()) + " family settings, " + std::to_string(checked) +
                               " points, " + std::to_string(violations) + " violations"};
}

Outcome ac8() {
  const Index n = 10, p = 40, q = 3;
  Rng rng(808, 0);
  const MatrixXd X = gaussian(n, p, rng);
  const RegressionData data(X, gaussian(n, q, rng));
  auto hp = HyperParams::defaults(q);
  ChainState s = initial_state(data, hp, 0.3);
  for (Index j = 0; j < p; ++j) s.xi(j) = rng.gamma(0.5, 0.5);
  s.Sigma << 1.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 0.8;
  const double mean_gap =
      (conditional_B_mean(s, data, BPath::Fast) - conditional_B_mean(s, data, BPath::Naive)).cwiseAbs().maxCoeff();

  // Second moments about the exact mean: every entry's variance and every
  // within-row cross-response covariance, i.e. 2 p q statistics.
  const MatrixXd M = conditional_B_mean(s, data, BPath::Naive);
  const int draws = 10000;
  auto moments = [&](BPath path, std::uint64_t seed) {
    Rng r(seed, 0);
    std::vector<std::vector<double>> v(static_cast<std::size_t>(2 * p * q));
    for (int t = 0; t < draws; ++t) {
      const MatrixXd c = conditional_B_sample(s, data, r, path) - M;
      std::size_t idx = 0;
      for (Index j = 0; j < p; ++j) {
        for (Index k = 0; k < q; ++k) v[idx++].push_back(c(j, k) * c(j, k));
        for (Index k = 0; k < q; ++k) v[idx++].push_back(c(j, k) * c(j, (k + 1) % q));
      }
    }
    std::vector<testing::McEstimate> out;
    for (const auto& x : v) out.push_back(testing::mc_summary(x));
    return out;
  };
  const auto fast = moments(BPath::Fast, 1);
  const auto naive = moments(BPath::Naive, 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < fast.size(); ++i) {
    worst = std::max(worst, std::abs(fast[i].mean - naive[i].mean) / std::hypot(fast[i].se, naive[i].se));
  }
  return {mean_gap <= 1e-8 && worst < 4.0,
          "max mean gap " + fmt(mean_gap) + ", max |z| over " + std::to_string(fast.size()) + " moments " + fmt(worst)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome ac9() {
  const fs::path dir = fs::temp_directory_path() / ("embsp_ac9_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  std::string outputs[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / std::to_string(run);
    const std::string cmd = std::string(EMBSP_CLI_PATH) + " experiment --ids 1 --replicates 4 --seed 7 --quiet --threads " +
                            (run == 0 ? "1" : "4") + " --out " + out.string();
    if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    outputs[run] = slurp(out / "metrics.csv");
  }
  fs::remove_all(dir);
  const bool pass = !outputs[0].empty() && outputs[0] == outputs[1];
  return {pass, "metrics.csv with 1 and 4 threads: " + std::string(pass ? "byte-identical" : "differ") + " (" +
                    std::to_string(outputs[0].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", {"getting-it-right", ac1}},          {"AC2", {"conjugate oracle", ac2}},
      {"AC3", {"experiment trend", ac3}},          {"AC4", {"selection recovery", ac4}},
      {"AC5", {"tail condition", ac5}},            {"AC6", {"volume identity", ac6}},
      {"AC7", {"slowly varying bounds", ac7}},     {"AC8", {"fast-path equivalence", ac8}},
      {"AC9", {"determinism", ac9}},
  };
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) ids.emplace_back(argv[i]);
  if (ids.empty()) {
    for (const auto& [id, _] : criteria) ids.push_back(id);
  }
  int failed = 0;
  for (const auto& id : ids) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << " [" << it->second.first << "] " << o.detail << " ("
              << fmt(secs) << " s)" << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
