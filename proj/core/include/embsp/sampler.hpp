#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "embsp/priors.hpp"
#include "embsp/rng.hpp"
#include "embsp/slice.hpp"

namespace embsp {

/// Observed data of the regression Y = X B + E Sigma^{1/2}.
class RegressionData {
 public:
  /// Throws ConfigError on row-count mismatch, empty matrices or non-finite entries.
  RegressionData(Eigen::MatrixXd X, Eigen::MatrixXd Y);

  const Eigen::MatrixXd& X() const noexcept { return X_; }
  const Eigen::MatrixXd& Y() const noexcept { return Y_; }
  Eigen::Index n() const noexcept { return X_.rows(); }
  Eigen::Index p() const noexcept { return X_.cols(); }
  Eigen::Index q() const noexcept { return Y_.cols(); }

 private:
  Eigen::MatrixXd X_;
  Eigen::MatrixXd Y_;
};

/// Sigma ~ IW(nu, Phi); B_j | xi_j, Sigma ~ N(0, tau xi_j Sigma); xi_j ~ family.
struct HyperParams {
  double nu = 0.0;
  Eigen::MatrixXd Phi;
  MixingFamily family = MixingFamily::horseshoe();
  GlobalScale tau = GlobalScale::automatic();

  /// nu = q + 2 (so E[Sigma] = Phi a priori), Phi = I_q.
  static HyperParams defaults(Eigen::Index q, MixingFamily family = MixingFamily::horseshoe());

  /// nu > q - 1 and Phi symmetric positive definite.
  void validate(Eigen::Index q) const;
};

enum class FastPath { Auto, Always, Never };
enum class BPath { Naive, Fast };

struct SamplerConfig {
  long iterations = 15000;
  long burn_in = 5000;
  long thinning = 1;
  std::uint64_t seed = 0;
  /// Stream index of this chain under `seed`.
  std::uint64_t chain_id = 0;
  FastPath fast_path = FastPath::Auto;
  /// Auto uses the fast B update when p > fast_path_ratio * n.
  double fast_path_ratio = 2.0;
  /// Freezes every xi_j at this value (conjugate matrix-normal/IW model).
  std::optional<double> fix_xi;

  void validate() const;
  long retained() const { return (iterations - burn_in) / thinning; }
};

/// One state of the blocked Gibbs sampler.
struct ChainState {
  Eigen::MatrixXd B;
  Eigen::MatrixXd Sigma;
  Eigen::VectorXd xi;
  /// Augmentation variables; empty unless the family is TPBN-type.
  Eigen::VectorXd zeta;
  double tau = 1.0;

  bool has_zeta() const noexcept { return zeta.size() > 0; }
};

struct PosteriorSamples {
  std::vector<ChainState> states;
  std::uint64_t seed = 0;
  std::uint64_t chain_id = 0;
  std::string config_digest;
  long iterations = 0;
  long burn_in = 0;
  long thinning = 1;
  double tau = 0.0;
  BPath b_path = BPath::Naive;
  double wall_seconds = 0.0;
  SliceDiagnostics slice;
  std::vector<std::string> warnings;
};

BPath choose_b_path(FastPath mode, Eigen::Index n, Eigen::Index p, double ratio = 2.0);

/// B = 0, Sigma = Phi / (nu + q + 1), xi = 1, zeta = 1 (TPBN-type only).
ChainState initial_state(const RegressionData& data, const HyperParams& hp, double tau);

/// Mean M = A^{-1} X'Y of the matrix-normal conditional, A = X'X + D^{-1}, D = tau diag(xi).
/// The fast path evaluates the same quantity as D X' (X D X' + I)^{-1} Y.
Eigen::MatrixXd conditional_B_mean(const ChainState& state, const RegressionData& data, BPath path);

/// Draw B ~ MN(M, A^{-1}, Sigma).
Eigen::MatrixXd conditional_B_sample(const ChainState& state, const RegressionData& data, Rng& rng, BPath path);

struct InverseWishartParams {
  double df = 0.0;
  Eigen::MatrixXd scale;
};

/// IW(nu + n + p, Phi + (Y - XB)'(Y - XB) + B' D^{-1} B).
InverseWishartParams conditional_Sigma_params(const ChainState& state, const RegressionData& data,
                                              const HyperParams& hp);

/// Bartlett-decomposition draw from IW(df, scale).
Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale, Rng& rng);

Eigen::MatrixXd conditional_Sigma_sample(const ChainState& state, const RegressionData& data, const HyperParams& hp,
                                         Rng& rng);

/// chi_j = B_j Sigma^{-1} B_j' / tau for every row.
Eigen::VectorXd xi_chi(const ChainState& state);

/// Draw xi_j from pi(xi) xi^{-q/2} exp(-chi / (2 xi)) (times the Gamma(u, zeta)
/// augmentation for TPBN-type families):
///   StudentT       inverse Gamma(a + q/2, a + chi/2)
///   TPBN-type      GIG(u - q/2, 2 zeta, chi)
///   otherwise      slice sampling on log xi starting from xi_current
/// TPBN-type with chi == 0 and u - q/2 <= 0 also falls back to slicing.
double draw_xi_conditional(const MixingFamily& family, Eigen::Index q, double chi, double zeta, double xi_current,
                           Rng& rng, SliceDiagnostics* diag = nullptr);

double conditional_xi_sample(const ChainState& state, const HyperParams& hp, Eigen::Index j, Rng& rng,
                             SliceDiagnostics* diag = nullptr);

/// zeta_j ~ Gamma(a + u, rate 1 + xi_j). Throws std::logic_error for non-TPBN families.
double conditional_zeta_sample(const ChainState& state, const HyperParams& hp, Eigen::Index j, Rng& rng);

struct SweepOptions {
  BPath b_path = BPath::Naive;
  std::optional<double> fix_xi;
  /// Added to the Sigma degrees of freedom. Nonzero only in mutation runs of
  /// the validation harness, which must detect the corrupted kernel.
  double sigma_df_offset = 0.0;
};

/// One sweep in the fixed order B -> xi -> zeta -> Sigma.
void gibbs_sweep(ChainState& state, const RegressionData& data, const HyperParams& hp, const SweepOptions& options,
                 Rng& rng, SliceDiagnostics* diag = nullptr);

/// Runs cfg.iterations sweeps and keeps every thinning-th post-burn-in state.
/// Identical (data, hp, cfg) give bit-identical output.
PosteriorSamples run_chain(const RegressionData& data, const HyperParams& hp, const SamplerConfig& cfg);

using StateVisitor = std::function<void(const ChainState&)>;

/// Streams each retained state to `visit` instead of storing it; the returned
/// object carries metadata only.
PosteriorSamples run_chain(const RegressionData& data, const HyperParams& hp, const SamplerConfig& cfg,
                           const StateVisitor& visit);

/// Hex FNV-1a digest of the sampler configuration and hyperparameters.
std::string config_digest(const HyperParams& hp, const SamplerConfig& cfg, double tau);

}  // namespace embsp
