#include "embsp/getting_it_right.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "embsp/errors.hpp"
#include "embsp/sampler.hpp"

namespace embsp {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

MatrixXd normal_matrix(Index rows, Index cols, Rng& rng) {
  MatrixXd m(rows, cols);
  for (Index k = 0; k < cols; ++k) {
    for (Index i = 0; i < rows; ++i) m(i, k) = rng.normal();
  }
  return m;
}

void record(std::vector<std::vector<double>>& sink, const std::vector<TestFunction>& fns, const ChainState& s,
            const char* side, long index) {
  for (std::size_t f = 0; f < fns.size(); ++f) {
    const double v = fns[f].eval(s);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "getting_it_right: test function " << fns[f].name << " is " << v << " on the " << side
         << " side at sample " << index << " (xi_1 = " << s.xi(0) << ", tr Sigma = " << s.Sigma.trace() << ")";
      throw NumericalError(os.str());
    }
    sink[f].push_back(v);
  }
}

}  // namespace

std::vector<TestFunction> default_test_functions(const MixingFamily& family) {
  std::vector<TestFunction> fns = {
      {"B11", [](const ChainState& s) { return s.B(0, 0); }},
      {"B11^2", [](const ChainState& s) { return s.B(0, 0) * s.B(0, 0); }},
      {"trace_Sigma", [](const ChainState& s) { return s.Sigma.trace(); }},
      {"log_xi1", [](const ChainState& s) { return std::log(s.xi(0)); }},
  };
  if (family.is_tpbn_type()) fns.push_back({"log_zeta1", [](const ChainState& s) { return std::log(s.zeta(0)); }});
  return fns;
}

GirConfig GirConfig::standard(long n, long p, long q, MixingFamily family) {
  GirConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.q = q;
  cfg.hp = HyperParams::defaults(q, family);
  cfg.hp.nu = static_cast<double>(q) + 5.0;
  cfg.hp.tau = GlobalScale::fixed(1.0);
  cfg.functions = default_test_functions(family);
  return cfg;
}

double GirResult::max_abs_z() const {
  double m = 0.0;
  for (const auto& s : statistics) m = std::max(m, std::abs(s.z));
  return m;
}

ChainState draw_prior_state(const HyperParams& hp, long p, long q, double tau, Rng& rng) {
  ChainState s;
  s.tau = tau;
  s.xi.resize(p);
  if (hp.family.is_tpbn_type()) {
    s.zeta.resize(p);
    for (Index j = 0; j < p; ++j) {
      s.zeta(j) = rng.gamma(hp.family.a(), 1.0);
      s.xi(j) = rng.gamma(hp.family.u(), s.zeta(j));
    }
  } else {
    for (Index j = 0; j < p; ++j) s.xi(j) = draw_mixing(hp.family, rng);
  }
  s.Sigma = sample_inverse_wishart(hp.nu, hp.Phi, rng);
  const MatrixXd L = Eigen::LLT<MatrixXd>(s.Sigma).matrixL();
  s.B = normal_matrix(p, q, rng);
  for (Index j = 0; j < p; ++j) s.B.row(j) *= std::sqrt(tau * s.xi(j));
  s.B = s.B * L.transpose();
  return s;
}

MatrixXd draw_response(const MatrixXd& X, const ChainState& state, Rng& rng) {
  Eigen::LLT<MatrixXd> llt(state.Sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("draw_response: Sigma is not positive definite");
  const MatrixXd L = llt.matrixL();
  return X * state.B + normal_matrix(X.rows(), state.Sigma.rows(), rng) * L.transpose();
}

double iid_standard_error(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return std::nan("");
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / (n - 1.0) / n);
}

double batch_means_standard_error(const std::vector<double>& values, long batches) {
  if (batches < 2 || static_cast<long>(values.size()) < batches) {
    throw DomainError("batch_means_standard_error: need at least `batches` >= 2 values");
  }
  const auto size = values.size() / static_cast<std::size_t>(batches);
  std::vector<double> means;
  for (long b = 0; b < batches; ++b) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(b) * size);
    means.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) /
                    static_cast<double>(size));
  }
  return iid_standard_error(means);
}

GirResult getting_it_right(const GirConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 30 || cfg.p < 1 || cfg.p > 15 || cfg.q < 1 || cfg.q > 3) {
    throw ConfigError("getting_it_right: sizes must satisfy n <= 30, p <= 15, q <= 3");
  }
  if (cfg.samples < 2 * cfg.batches || cfg.thinning < 1 || cfg.burn_in < 0) {
    throw ConfigError("getting_it_right: invalid sample, thinning or burn-in settings");
  }
  if (cfg.functions.empty()) throw ConfigError("getting_it_right: no test functions");
  cfg.hp.validate(cfg.q);
  const double tau = cfg.hp.tau.resolve(cfg.n, cfg.p);

  Rng design_rng(cfg.seed, 0);
  const MatrixXd X = normal_matrix(cfg.n, cfg.p, design_rng);

  const std::size_t nf = cfg.functions.size();
  std::vector<std::vector<double>> marginal(nf), successive(nf);
  for (auto& v : marginal) v.reserve(static_cast<std::size_t>(cfg.samples));
  for (auto& v : successive) v.reserve(static_cast<std::size_t>(cfg.samples));

  Rng mrng(cfg.seed, 1);
  for (long i = 0; i < cfg.samples; ++i) {
    record(marginal, cfg.functions, draw_prior_state(cfg.hp, cfg.p, cfg.q, tau, mrng), "marginal", i);
  }

  Rng srng(cfg.seed, 2);
  ChainState state = draw_prior_state(cfg.hp, cfg.p, cfg.q, tau, srng);
  MatrixXd Y = draw_response(X, state, srng);
  SweepOptions opts;
  opts.b_path = BPath::Naive;
  opts.sigma_df_offset = cfg.sigma_df_offset;
  const long total = cfg.burn_in + cfg.samples * cfg.thinning;
  for (long it = 0; it < total; ++it) {
    const RegressionData data(X, Y);
    gibbs_sweep(state, data, cfg.hp, opts, srng);
    Y = draw_response(X, state, srng);
    const long k = it - cfg.burn_in;
    if (k >= 0 && (k + 1) % cfg.thinning == 0) record(successive, cfg.functions, state, "successive", k);
  }

  GirResult out;
  for (std::size_t f = 0; f < nf; ++f) {
    GirStatistic st;
    st.name = cfg.functions[f].name;
    st.mean_marginal = mean_of(marginal[f]);
    st.mean_successive = mean_of(successive[f]);
    st.se_marginal = iid_standard_error(marginal[f]);
    st.se_successive = batch_means_standard_error(successive[f], cfg.batches);
    const double se = std::hypot(st.se_marginal, st.se_successive);
    st.z = se > 0.0 ? (st.mean_marginal - st.mean_successive) / se : 0.0;
    out.statistics.push_back(st);
  }
  return out;
}

}  // namespace embsp
