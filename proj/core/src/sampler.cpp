#include "embsp/sampler.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "embsp/errors.hpp"
#include "embsp/gig.hpp"

namespace embsp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::LLT<MatrixXd> cholesky(const MatrixXd& m, const char* what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string("Cholesky factorization failed for ") + what);
  }
  return llt;
}

MatrixXd standard_normal(Index rows, Index cols, Rng& rng) {
  MatrixXd z(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) z(r, c) = rng.normal();
  }
  return z;
}

VectorXd prior_scales(const ChainState& state) { return state.tau * state.xi.array(); }

void check_state(const ChainState& state, const RegressionData& data) {
  if (state.B.rows() != data.p() || state.B.cols() != data.q() || state.Sigma.rows() != data.q() ||
      state.Sigma.cols() != data.q() || state.xi.size() != data.p()) {
    throw ConfigError("chain state dimensions do not match the data");
  }
}

void fnv_mix(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

RegressionData::RegressionData(MatrixXd X, MatrixXd Y) : X_(std::move(X)), Y_(std::move(Y)) {
  if (X_.rows() == 0 || X_.cols() == 0 || Y_.cols() == 0) throw ConfigError("X and Y must be non-empty");
  if (X_.rows() != Y_.rows()) {
    std::ostringstream os;
    os << "X has " << X_.rows() << " rows but Y has " << Y_.rows();
    throw ConfigError(os.str());
  }
  if (!X_.allFinite() || !Y_.allFinite()) throw ConfigError("X and Y must contain only finite values");
}

HyperParams HyperParams::defaults(Index q, MixingFamily family) {
  HyperParams hp;
  hp.nu = static_cast<double>(q) + 2.0;
  hp.Phi = MatrixXd::Identity(q, q);
  hp.family = std::move(family);
  return hp;
}

void HyperParams::validate(Index q) const {
  if (Phi.rows() != q || Phi.cols() != q) throw ConfigError("Phi must be q x q");
  if (!(nu > static_cast<double>(q) - 1.0)) throw ConfigError("nu must exceed q - 1");
  if (!Phi.isApprox(Phi.transpose(), 1e-12)) throw ConfigError("Phi must be symmetric");
  Eigen::LLT<MatrixXd> llt(Phi);
  if (llt.info() != Eigen::Success) throw ConfigError("Phi must be positive definite");
}

void SamplerConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw ConfigError("burn_in must satisfy 0 <= burn_in < iterations");
  if (thinning < 1) throw ConfigError("thinning must be positive");
  if (fix_xi && !(*fix_xi > 0.0)) throw ConfigError("fix_xi must be positive");
  if (!(fast_path_ratio > 0.0)) throw ConfigError("fast_path_ratio must be positive");
}

BPath choose_b_path(FastPath mode, Index n, Index p, double ratio) {
  switch (mode) {
    case FastPath::Always: return BPath::Fast;
    case FastPath::Never: return BPath::Naive;
    case FastPath::Auto: return static_cast<double>(p) > ratio * static_cast<double>(n) ? BPath::Fast : BPath::Naive;
  }
  return BPath::Naive;
}

ChainState initial_state(const RegressionData& data, const HyperParams& hp, double tau) {
  ChainState s;
  const Index q = data.q();
  s.B = MatrixXd::Zero(data.p(), q);
  s.Sigma = hp.Phi / (hp.nu + static_cast<double>(q) + 1.0);
  s.xi = VectorXd::Ones(data.p());
  if (hp.family.is_tpbn_type()) s.zeta = VectorXd::Ones(data.p());
  s.tau = tau;
  return s;
}

MatrixXd conditional_B_mean(const ChainState& state, const RegressionData& data, BPath path) {
  check_state(state, data);
  const MatrixXd& X = data.X();
  const VectorXd d = prior_scales(state);
  if (path == BPath::Naive) {
    MatrixXd A = X.transpose() * X;
    A.diagonal().array() += d.array().inverse();
    return cholesky(A, "X'X + D^{-1}").solve(X.transpose() * data.Y());
  }
  const MatrixXd Xs = X * d.array().sqrt().matrix().asDiagonal();
  MatrixXd G = MatrixXd::Identity(data.n(), data.n());
  G.selfadjointView<Eigen::Lower>().rankUpdate(Xs);
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  const MatrixXd W = cholesky(G, "X D X' + I").solve(data.Y());
  return d.asDiagonal() * (X.transpose() * W);
}

MatrixXd conditional_B_sample(const ChainState& state, const RegressionData& data, Rng& rng, BPath path) {
  check_state(state, data);
  const MatrixXd& X = data.X();
  const Index n = data.n();
  const Index p = data.p();
  const Index q = data.q();
  const VectorXd d = prior_scales(state);
  const auto sigma_llt = cholesky(state.Sigma, "Sigma");
  const MatrixXd L = sigma_llt.matrixL();

  if (path == BPath::Naive) {
    MatrixXd A = X.transpose() * X;
    A.diagonal().array() += d.array().inverse();
    const auto a_llt = cholesky(A, "X'X + D^{-1}");
    const MatrixXd M = a_llt.solve(X.transpose() * data.Y());
    const MatrixXd Z = standard_normal(p, q, rng);
    // Row covariance A^{-1} = R^{-T} R^{-1}; column covariance Sigma = L L'.
    const MatrixXd rows = a_llt.matrixU().solve(Z);
    return M + rows * L.transpose();
  }

  // Whitened columns are independent regressions with unit noise and prior N(0, D).
  const MatrixXd Yw = L.triangularView<Eigen::Lower>().solve(data.Y().transpose()).transpose();
  const VectorXd sd = d.array().sqrt();
  const MatrixXd Xs = X * sd.asDiagonal();
  MatrixXd G = MatrixXd::Identity(n, n);
  G.selfadjointView<Eigen::Lower>().rankUpdate(Xs);
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  const auto g_llt = cholesky(G, "X D X' + I");

  const MatrixXd U = sd.asDiagonal() * standard_normal(p, q, rng);
  const MatrixXd Delta = standard_normal(n, q, rng);
  const MatrixXd V = X * U + Delta;
  const MatrixXd W = g_llt.solve(Yw - V);
  const MatrixXd Bw = U + d.asDiagonal() * (X.transpose() * W);
  return Bw * L.transpose();
}

InverseWishartParams conditional_Sigma_params(const ChainState& state, const RegressionData& data,
                                              const HyperParams& hp) {
  check_state(state, data);
  const MatrixXd R = data.Y() - data.X() * state.B;
  const VectorXd dinv = prior_scales(state).array().inverse();
  MatrixXd S = hp.Phi;
  S.noalias() += R.transpose() * R;
  S.noalias() += state.B.transpose() * dinv.asDiagonal() * state.B;
  return {hp.nu + static_cast<double>(data.n() + data.p()), symmetrize(S)};
}

MatrixXd sample_inverse_wishart(double df, const MatrixXd& scale, Rng& rng) {
  const Index q = scale.rows();
  if (!(df > static_cast<double>(q) - 1.0)) throw DomainError("inverse Wishart requires df > q - 1");
  const auto llt = cholesky(symmetrize(scale), "inverse-Wishart scale matrix");
  const MatrixXd L = llt.matrixL();
  MatrixXd A = MatrixXd::Zero(q, q);
  for (Index i = 0; i < q; ++i) {
    A(i, i) = std::sqrt(rng.chi_square(df - static_cast<double>(i)));
    for (Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  // Sigma = L A^{-T} A^{-1} L'.
  const MatrixXd M = A.triangularView<Eigen::Lower>().solve(L.transpose());
  return symmetrize(M.transpose() * M);
}

MatrixXd conditional_Sigma_sample(const ChainState& state, const RegressionData& data, const HyperParams& hp,
                                  Rng& rng) {
  const auto params = conditional_Sigma_params(state, data, hp);
  return sample_inverse_wishart(params.df, params.scale, rng);
}

VectorXd xi_chi(const ChainState& state) {
  const auto llt = cholesky(state.Sigma, "Sigma");
  const MatrixXd Bw = llt.matrixL().solve(state.B.transpose());
  return Bw.colwise().squaredNorm().transpose() / state.tau;
}

double draw_xi_conditional(const MixingFamily& family, Index q, double chi, double zeta, double xi_current, Rng& rng,
                           SliceDiagnostics* diag) {
  if (!std::isfinite(chi) || chi < 0.0) throw NumericalError("xi conditional: chi is not finite and non-negative");
  const double half_q = 0.5 * static_cast<double>(q);
  if (family.kind() == FamilyKind::StudentT) {
    return rng.inverse_gamma(family.a() + half_q, family.a() + 0.5 * chi);
  }
  if (family.is_tpbn_type()) {
    const double lambda = family.u() - half_q;
    if (chi > 0.0 || lambda > 0.0) return sample_gig(lambda, 2.0 * zeta, chi, rng);
    // GIG(lambda <= 0, psi, 0) is improper; slice on the augmented target.
    auto log_target = [&](double t) { return (lambda)*t - zeta * std::exp(t); };
    return std::exp(slice_sample_step(std::log(xi_current), log_target, rng, {}, diag));
  }
  auto log_target = [&](double t) {
    const double quad = chi == 0.0 ? 0.0 : 0.5 * chi * std::exp(-t);
    return log_unnormalized_mixing_density(family, t) - half_q * t - quad + t;
  };
  return std::exp(slice_sample_step(std::log(xi_current), log_target, rng, {}, diag));
}

double conditional_xi_sample(const ChainState& state, const HyperParams& hp, Index j, Rng& rng,
                             SliceDiagnostics* diag) {
  if (j < 0 || j >= state.B.rows()) throw std::out_of_range("conditional_xi_sample: row index out of range");
  const auto llt = cholesky(state.Sigma, "Sigma");
  const VectorXd bw = llt.matrixL().solve(state.B.row(j).transpose());
  const double chi = bw.squaredNorm() / state.tau;
  const double zeta = state.has_zeta() ? state.zeta(j) : 1.0;
  return draw_xi_conditional(hp.family, state.B.cols(), chi, zeta, state.xi(j), rng, diag);
}

double conditional_zeta_sample(const ChainState& state, const HyperParams& hp, Index j, Rng& rng) {
  if (!hp.family.is_tpbn_type()) {
    throw std::logic_error("conditional_zeta_sample called for a family without Gamma augmentation");
  }
  return rng.gamma(hp.family.a() + hp.family.u(), 1.0 + state.xi(j));
}

void gibbs_sweep(ChainState& state, const RegressionData& data, const HyperParams& hp, const SweepOptions& options,
                 Rng& rng, SliceDiagnostics* diag) {
  state.B = conditional_B_sample(state, data, rng, options.b_path);
  if (options.fix_xi) {
    state.xi.setConstant(*options.fix_xi);
  } else {
    const VectorXd chi = xi_chi(state);
    for (Index j = 0; j < state.xi.size(); ++j) {
      const double zeta = state.has_zeta() ? state.zeta(j) : 1.0;
      state.xi(j) = draw_xi_conditional(hp.family, data.q(), chi(j), zeta, state.xi(j), rng, diag);
    }
    if (state.has_zeta()) {
      for (Index j = 0; j < state.zeta.size(); ++j) state.zeta(j) = conditional_zeta_sample(state, hp, j, rng);
    }
  }
  auto params = conditional_Sigma_params(state, data, hp);
  state.Sigma = sample_inverse_wishart(params.df + options.sigma_df_offset, params.scale, rng);
}

std::string config_digest(const HyperParams& hp, const SamplerConfig& cfg, double tau) {
  std::ostringstream os;
  os.precision(17);
  os << "iterations=" << cfg.iterations << ";burn_in=" << cfg.burn_in << ";thinning=" << cfg.thinning
     << ";seed=" << cfg.seed << ";chain=" << cfg.chain_id << ";fast_path=" << static_cast<int>(cfg.fast_path)
     << ";ratio=" << cfg.fast_path_ratio << ";fix_xi=" << (cfg.fix_xi ? *cfg.fix_xi : 0.0)
     << ";family=" << hp.family.to_string() << ";nu=" << hp.nu << ";tau=" << tau << ";phi=";
  for (Index i = 0; i < hp.Phi.size(); ++i) os << hp.Phi.data()[i] << ',';
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv_mix(h, os.str());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PosteriorSamples run_chain(const RegressionData& data, const HyperParams& hp, const SamplerConfig& cfg) {
  PosteriorSamples out;
  out.states.reserve(static_cast<std::size_t>(cfg.retained() > 0 ? cfg.retained() : 0));
  auto keep = [&out](const ChainState& s) { out.states.push_back(s); };
  PosteriorSamples meta = run_chain(data, hp, cfg, keep);
  meta.states = std::move(out.states);
  return meta;
}

PosteriorSamples run_chain(const RegressionData& data, const HyperParams& hp, const SamplerConfig& cfg,
                           const StateVisitor& visit) {
  cfg.validate();
  hp.validate(data.q());
  const auto start = std::chrono::steady_clock::now();

  PosteriorSamples out;
  out.tau = hp.tau.resolve(static_cast<long>(data.n()), static_cast<long>(data.p()));
  out.seed = cfg.seed;
  out.chain_id = cfg.chain_id;
  out.iterations = cfg.iterations;
  out.burn_in = cfg.burn_in;
  out.thinning = cfg.thinning;
  out.b_path = choose_b_path(cfg.fast_path, data.n(), data.p(), cfg.fast_path_ratio);
  out.config_digest = config_digest(hp, cfg, out.tau);
  if (out.tau < 1e-12) {
    std::ostringstream os;
    os << "global scale tau = " << out.tau << " is below 1e-12; the sampler may mix poorly";
    out.warnings.push_back(os.str());
  }

  SweepOptions options;
  options.b_path = out.b_path;
  options.fix_xi = cfg.fix_xi;

  Rng rng(cfg.seed, cfg.chain_id);
  ChainState state = initial_state(data, hp, out.tau);
  if (cfg.fix_xi) state.xi.setConstant(*cfg.fix_xi);
  long kept = 0;

  for (long it = 0; it < cfg.iterations; ++it) {
    try {
      gibbs_sweep(state, data, hp, options, rng, &out.slice);
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << "iteration " << it << ": " << e.what();
      throw NumericalError(os.str());
    }
    const long k = it - cfg.burn_in;
    if (k >= 0 && (k + 1) % cfg.thinning == 0 && kept < cfg.retained()) {
      visit(state);
      ++kept;
    }
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace embsp
