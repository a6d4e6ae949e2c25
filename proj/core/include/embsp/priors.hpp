#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace embsp {

class Rng;

enum class FamilyKind { StudentT, TPBN, Horseshoe, NEG, GDP, HIB, HorseshoePlus };

namespace detail {
struct NormalizerCache;
}

/// Mixing density pi(xi) of a Gaussian scale-mixture prior on a row of B.
///
/// Unnormalized densities:
///   StudentT(a)         xi^{-a-1} exp(-a/xi)
///   TPBN(u, a)          xi^{u-1} (1+xi)^{-a-u}
///   Horseshoe           xi^{-1/2} (1+xi)^{-1}           == TPBN(1/2, 1/2)
///   NEG(a)              (1+xi)^{-a-1}                   == TPBN(1, a)
///   GDP(a, eta)         int_0^inf (l^2/2) exp(-l^2 xi/2) l^{2a-1} exp(-eta l) dl
///   HIB(u, a, s, phi2)  TPBN(u, a) * exp(-s/(1+xi)) (phi2 + (1-phi2)/(1+xi))^{-1}
///   HorseshoePlus       xi^{-1/2} (xi-1)^{-1} log(xi)
///
/// Values are cheap to copy. Copies share one lazily computed normalizer.
class MixingFamily {
 public:
  static MixingFamily student_t(double a);
  static MixingFamily tpbn(double u, double a);
  static MixingFamily horseshoe();
  static MixingFamily neg(double a);
  static MixingFamily gdp(double a, double eta);
  static MixingFamily hib(double u, double a, double s, double phi2);
  static MixingFamily horseshoe_plus();

  FamilyKind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  /// TPBN-type u parameter (Horseshoe: 1/2, NEG: 1).
  double u() const noexcept { return u_; }
  double eta() const noexcept { return eta_; }
  double s() const noexcept { return s_; }
  double phi2() const noexcept { return phi2_; }

  /// TPBN, Horseshoe and NEG: sampled with the Gamma-Gamma augmentation.
  bool is_tpbn_type() const noexcept;

  /// Canonical family string, e.g. "tpbn:u=0.5,a=0.5".
  std::string to_string() const;
  std::string name() const;

 private:
  MixingFamily(FamilyKind kind, double a, double u, double eta, double s, double phi2);

  FamilyKind kind_;
  double a_ = 0.0;
  double u_ = 0.0;
  double eta_ = 0.0;
  double s_ = 0.0;
  double phi2_ = 1.0;
  std::shared_ptr<detail::NormalizerCache> cache_;

  friend double mixing_normalizer(const MixingFamily& family);
};

/// Parses `horseshoe`, `tpbn:u=0.5,a=0.5`, `neg:a=1`, `student-t:a=3`,
/// `gdp:a=1,eta=1`, `hib:u=0.5,a=0.5,s=0,phi2=1`, `horseshoe-plus`.
/// Missing keys take the defaults shown; unknown keys throw ParseError.
MixingFamily parse_family(std::string_view spec);

/// log of the unnormalized Table-style density at xi = exp(log_xi).
/// Written in log_xi so that the slice sampler can roam far into the tails.
double log_unnormalized_mixing_density(const MixingFamily& family, double log_xi);

double unnormalized_mixing_density(const MixingFamily& family, double xi);

/// Integral of the unnormalized density over (0, inf). Closed form for
/// StudentT, TPBN, Horseshoe and NEG; otherwise computed once by quadrature
/// (relative tolerance 1e-10) and cached. Thread safe.
double mixing_normalizer(const MixingFamily& family);

/// Normalized mixing density. Throws DomainError for xi <= 0.
double mixing_density(const MixingFamily& family, double xi);

/// Polynomial-tail form pi(xi) = K xi^{-r} L(xi) of the unnormalized density.
struct TailDecomposition {
  double r = 0.0;
  double L = 0.0;
};

double tail_exponent(const MixingFamily& family);

/// K such that unnormalized density == K xi^{-r} L(xi).
/// HIB: K = 1 / ((1 v phi2) e^s), fixed by matching the density at xi = 1.
double tail_constant(const MixingFamily& family);

TailDecomposition tail_decomposition(const MixingFamily& family, double xi);

struct SlowlyVaryingBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Lower/upper bounds on L(xi). Horseshoe+ bounds hold for xi >= 1; the HIB
/// lower bound requires s >= 0.
SlowlyVaryingBounds slowly_varying_bounds(const MixingFamily& family, double xi);

/// Behaviour of pi(xi) ~ xi^beta (log xi)^k as xi -> 0. Used to decide whether
/// the marginal prior diverges at the origin.
struct OriginBehaviour {
  double beta = 0.0;
  bool log_factor = false;
  /// StudentT: pi vanishes faster than any power.
  bool super_polynomial = false;
};
OriginBehaviour origin_behaviour(const MixingFamily& family);

/// Marginal row prior g_tau(x) = int N_q(x; 0, tau xi I) pi(xi) dxi at |x| = radius.
/// std::nullopt means the density diverges (radius 0 with a non-integrable pole).
std::optional<double> marginal_prior_density(const MixingFamily& family, double tau, int q, double radius);

/// log g_tau; -inf never returned for radius > 0; +inf when divergent.
double log_marginal_prior_density(const MixingFamily& family, double tau, int q, double radius);

/// Draw xi ~ pi.
double draw_mixing(const MixingFamily& family, Rng& rng);

/// 1 / (p sqrt(n log n)).
double default_tau(long n, long p);

/// a_n^2 p^{-(1+u')/(r-1)} with the unspecified constant set to 1.
double theoretical_tau_max(double a_n, long p, double r, double u_prime);

/// Global scale tau: fixed or resolved from (n, p) with default_tau.
class GlobalScale {
 public:
  static GlobalScale automatic() { return GlobalScale(); }
  static GlobalScale fixed(double tau);

  bool is_auto() const noexcept { return !value_.has_value(); }
  double resolve(long n, long p) const;
  std::string to_string() const;

 private:
  GlobalScale() = default;
  std::optional<double> value_;
};

}  // namespace embsp
