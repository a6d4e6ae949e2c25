#include "embsp/priors.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "embsp/errors.hpp"
#include "embsp/quadrature.hpp"
#include "embsp/rng.hpp"

namespace embsp {

namespace detail {
struct NormalizerCache {
  std::once_flag once;
  double value = 0.0;
};
}  // namespace detail

namespace {

constexpr double kNormalizerTol = 1e-10;
constexpr double kDensityTol = 1e-8;
// GDP's density is itself an integral; it sits inside the normalizer quadrature.
constexpr double kInnerTol = 1e-12;

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// 1 / (1 + e^t).
double inv_one_plus_exp(double t) {
  if (t > 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

// log(t / (e^t - 1)) = log(log xi / (xi - 1)) at xi = e^t; continuous through t = 0.
double log_log_ratio(double t) {
  if (std::abs(t) < 1e-6) return -0.5 * t;
  if (t > 0.0) return std::log(t) - t - std::log1p(-std::exp(-t));
  return std::log(-t) - std::log(-std::expm1(t));
}

// log(xi)/(xi-1) for xi near 1, via log1p.
double log_ratio_over_x(double xi) {
  const double x = xi - 1.0;
  if (x == 0.0) return 1.0;
  return std::log1p(x) / x;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "mixing family parameter " << what << " must be positive and finite (got " << v << ")";
    throw DomainError(os.str());
  }
}

void require_xi(double xi) {
  if (!(xi > 0.0) || std::isnan(xi)) {
    std::ostringstream os;
    os << "xi must be positive (got " << xi << ")";
    throw DomainError(os.str());
  }
}

// log int_0^inf (l^2/2) exp(-l^2 xi/2) l^{2a-1} exp(-eta l) dl at xi = e^t, integrated in v = log l.
double gdp_log_density(double a, double eta, double t) {
  const double xi = std::exp(t);
  const double k = 2.0 * a + 2.0;
  double peak_l = 2.0 * k / (eta + std::sqrt(eta * eta + 4.0 * xi * k));
  if (!(peak_l > 0.0) || !std::isfinite(peak_l)) peak_l = k / eta;
  auto log_f = [=](double v) { return k * v - 0.5 * std::exp(2.0 * v + t) - eta * std::exp(v); };
  const auto res = integrate_exp_over_line(log_f, kInnerTol, std::log(peak_l));
  return res.log_value - std::log(2.0);
}

// log int_0^inf s^a exp(-s - eta sqrt(2 s / xi)) ds, integrated in w = log s.
double gdp_log_tail_integral(double a, double eta, double xi) {
  const double c = eta * std::sqrt(2.0 / xi);
  const double root = 2.0 * (a + 1.0) / (0.5 * c + std::sqrt(0.25 * c * c + 4.0 * (a + 1.0)));
  auto log_f = [=](double w) { return (a + 1.0) * w - std::exp(w) - c * std::exp(0.5 * w); };
  return integrate_exp_over_line(log_f, kInnerTol, 2.0 * std::log(root)).log_value;
}

}  // namespace

MixingFamily::MixingFamily(FamilyKind kind, double a, double u, double eta, double s, double phi2)
    : kind_(kind), a_(a), u_(u), eta_(eta), s_(s), phi2_(phi2),
      cache_(std::make_shared<detail::NormalizerCache>()) {}

MixingFamily MixingFamily::student_t(double a) {
  require_positive(a, "a");
  return MixingFamily(FamilyKind::StudentT, a, 0.0, 0.0, 0.0, 1.0);
}

MixingFamily MixingFamily::tpbn(double u, double a) {
  require_positive(u, "u");
  require_positive(a, "a");
  return MixingFamily(FamilyKind::TPBN, a, u, 0.0, 0.0, 1.0);
}

MixingFamily MixingFamily::horseshoe() { return MixingFamily(FamilyKind::Horseshoe, 0.5, 0.5, 0.0, 0.0, 1.0); }

MixingFamily MixingFamily::neg(double a) {
  require_positive(a, "a");
  return MixingFamily(FamilyKind::NEG, a, 1.0, 0.0, 0.0, 1.0);
}

MixingFamily MixingFamily::gdp(double a, double eta) {
  require_positive(a, "a");
  require_positive(eta, "eta");
  return MixingFamily(FamilyKind::GDP, a, 0.0, eta, 0.0, 1.0);
}

MixingFamily MixingFamily::hib(double u, double a, double s, double phi2) {
  require_positive(u, "u");
  require_positive(a, "a");
  require_positive(phi2, "phi2");
  if (!std::isfinite(s)) throw DomainError("mixing family parameter s must be finite");
  return MixingFamily(FamilyKind::HIB, a, u, 0.0, s, phi2);
}

MixingFamily MixingFamily::horseshoe_plus() {
  return MixingFamily(FamilyKind::HorseshoePlus, 0.25, 0.0, 0.0, 0.0, 1.0);
}

bool MixingFamily::is_tpbn_type() const noexcept {
  return kind_ == FamilyKind::TPBN || kind_ == FamilyKind::Horseshoe || kind_ == FamilyKind::NEG;
}

std::string MixingFamily::name() const {
  switch (kind_) {
    case FamilyKind::StudentT: return "student-t";
    case FamilyKind::TPBN: return "tpbn";
    case FamilyKind::Horseshoe: return "horseshoe";
    case FamilyKind::NEG: return "neg";
    case FamilyKind::GDP: return "gdp";
    case FamilyKind::HIB: return "hib";
    case FamilyKind::HorseshoePlus: return "horseshoe-plus";
  }
  return "unknown";
}

std::string MixingFamily::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << name();
  switch (kind_) {
    case FamilyKind::StudentT: os << ":a=" << a_; break;
    case FamilyKind::TPBN: os << ":u=" << u_ << ",a=" << a_; break;
    case FamilyKind::NEG: os << ":a=" << a_; break;
    case FamilyKind::GDP: os << ":a=" << a_ << ",eta=" << eta_; break;
    case FamilyKind::HIB: os << ":u=" << u_ << ",a=" << a_ << ",s=" << s_ << ",phi2=" << phi2_; break;
    case FamilyKind::Horseshoe:
    case FamilyKind::HorseshoePlus: break;
  }
  return os.str();
}

double log_unnormalized_mixing_density(const MixingFamily& f, double t) {
  switch (f.kind()) {
    case FamilyKind::StudentT:
      return -(f.a() + 1.0) * t - f.a() * std::exp(-t);
    case FamilyKind::TPBN:
      return (f.u() - 1.0) * t - (f.a() + f.u()) * softplus(t);
    case FamilyKind::Horseshoe:
      return -0.5 * t - softplus(t);
    case FamilyKind::NEG:
      return -(f.a() + 1.0) * softplus(t);
    case FamilyKind::GDP:
      return gdp_log_density(f.a(), f.eta(), t);
    case FamilyKind::HIB: {
      const double w = inv_one_plus_exp(t);
      return (f.u() - 1.0) * t - (f.a() + f.u()) * softplus(t) - f.s() * w -
             std::log(f.phi2() + (1.0 - f.phi2()) * w);
    }
    case FamilyKind::HorseshoePlus:
      return -0.5 * t + log_log_ratio(t);
  }
  return -std::numeric_limits<double>::infinity();
}

double unnormalized_mixing_density(const MixingFamily& family, double xi) {
  require_xi(xi);
  if (family.kind() == FamilyKind::HorseshoePlus && std::abs(xi - 1.0) < 1e-4) {
    return log_ratio_over_x(xi) / std::sqrt(xi);
  }
  return std::exp(log_unnormalized_mixing_density(family, std::log(xi)));
}

double mixing_normalizer(const MixingFamily& family) {
  detail::NormalizerCache& cache = *family.cache_;
  std::call_once(cache.once, [&] {
    const double a = family.a();
    const double u = family.u();
    switch (family.kind()) {
      case FamilyKind::StudentT:
        cache.value = std::exp(boost::math::lgamma(a) - a * std::log(a));
        return;
      case FamilyKind::TPBN:
        cache.value = boost::math::beta(u, a);
        return;
      case FamilyKind::Horseshoe:
        cache.value = std::numbers::pi;
        return;
      case FamilyKind::NEG:
        cache.value = 1.0 / a;
        return;
      case FamilyKind::GDP:
      case FamilyKind::HIB:
      case FamilyKind::HorseshoePlus: {
        auto log_f = [&](double t) { return log_unnormalized_mixing_density(family, t) + t; };
        LogIntegral res;
        try {
          res = integrate_exp_over_line(log_f, kNormalizerTol);
        } catch (const NumericalError& e) {
          throw NormalizationError(std::string("normalizer of ") + family.to_string() + ": " + e.what());
        }
        cache.value = std::exp(res.log_value);
        return;
      }
    }
  });
  return cache.value;
}

double mixing_density(const MixingFamily& family, double xi) {
  return unnormalized_mixing_density(family, xi) / mixing_normalizer(family);
}

double tail_exponent(const MixingFamily& f) {
  switch (f.kind()) {
    case FamilyKind::Horseshoe: return 1.5;
    case FamilyKind::HorseshoePlus: return 1.25;
    case FamilyKind::StudentT:
    case FamilyKind::TPBN:
    case FamilyKind::NEG:
    case FamilyKind::GDP:
    case FamilyKind::HIB: return f.a() + 1.0;
  }
  return 0.0;
}

double tail_constant(const MixingFamily& f) {
  switch (f.kind()) {
    case FamilyKind::GDP: return std::exp((f.a() - 1.0) * std::log(2.0) + boost::math::lgamma(f.a() + 1.0));
    case FamilyKind::HIB: return std::exp(-f.s()) / std::max(1.0, f.phi2());
    case FamilyKind::HorseshoePlus: return 4.0;
    default: return 1.0;
  }
}

TailDecomposition tail_decomposition(const MixingFamily& f, double xi) {
  require_xi(xi);
  TailDecomposition out;
  out.r = tail_exponent(f);
  const double ratio = xi / (1.0 + xi);
  switch (f.kind()) {
    case FamilyKind::StudentT:
      out.L = std::exp(-f.a() / xi);
      break;
    case FamilyKind::TPBN:
      out.L = std::pow(ratio, f.a() + f.u());
      break;
    case FamilyKind::Horseshoe:
      out.L = ratio;
      break;
    case FamilyKind::NEG:
      out.L = std::pow(ratio, f.a() + 1.0);
      break;
    case FamilyKind::GDP:
      out.L = std::exp(gdp_log_tail_integral(f.a(), f.eta(), xi) - boost::math::lgamma(f.a() + 1.0));
      break;
    case FamilyKind::HIB: {
      const double w = 1.0 / (1.0 + xi);
      out.L = std::max(1.0, f.phi2()) * std::exp(f.s() - f.s() * w) / (f.phi2() + (1.0 - f.phi2()) * w) *
              std::pow(ratio, f.a() + f.u());
      break;
    }
    case FamilyKind::HorseshoePlus: {
      const double h = std::abs(xi - 1.0) < 1e-4 ? log_ratio_over_x(xi) : std::log(xi) / (xi - 1.0);
      out.L = std::pow(xi, 0.75) * h / 4.0;
      break;
    }
  }
  return out;
}

SlowlyVaryingBounds slowly_varying_bounds(const MixingFamily& f, double xi) {
  require_xi(xi);
  switch (f.kind()) {
    case FamilyKind::StudentT: return {1.0 - f.a() / xi, 1.0};
    case FamilyKind::TPBN: return {1.0 - (f.a() + f.u()) / xi, 1.0};
    case FamilyKind::Horseshoe: return {1.0 - 1.0 / xi, 1.0};
    case FamilyKind::NEG: return {1.0 - (f.a() + 1.0) / xi, 1.0};
    case FamilyKind::GDP: {
      const double g = std::exp(boost::math::lgamma(f.a() + 1.5) - boost::math::lgamma(f.a() + 1.0));
      return {1.0 - std::numbers::sqrt2 * f.eta() * g / std::sqrt(xi), 1.0};
    }
    case FamilyKind::HIB:
      return {1.0 - (f.a() + f.u()) / xi, std::max(f.phi2(), 1.0 / f.phi2()) * std::exp(f.s())};
    case FamilyKind::HorseshoePlus: return {std::pow(xi, -0.25) / 4.0, 1.0};
  }
  return {0.0, 0.0};
}

OriginBehaviour origin_behaviour(const MixingFamily& f) {
  switch (f.kind()) {
    case FamilyKind::StudentT: return {0.0, false, true};
    case FamilyKind::TPBN:
    case FamilyKind::HIB: return {f.u() - 1.0, false, false};
    case FamilyKind::Horseshoe: return {-0.5, false, false};
    case FamilyKind::NEG:
    case FamilyKind::GDP: return {0.0, false, false};
    case FamilyKind::HorseshoePlus: return {-0.5, true, false};
  }
  return {};
}

double log_marginal_prior_density(const MixingFamily& family, double tau, int q, double radius) {
  if (!(tau > 0.0) || q < 1 || !(radius >= 0.0)) {
    throw DomainError("marginal_prior_density requires tau > 0, q >= 1, radius >= 0");
  }
  if (radius == 0.0) {
    const auto ob = origin_behaviour(family);
    if (!ob.super_polynomial && ob.beta - 0.5 * q <= -1.0) return std::numeric_limits<double>::infinity();
  }
  const double log_z = std::log(mixing_normalizer(family));
  const double half_q = 0.5 * q;
  const double log_two_pi_tau = std::log(2.0 * std::numbers::pi * tau);
  const double c = radius * radius / (2.0 * tau);
  auto log_f = [&](double t) {
    const double quad = c == 0.0 ? 0.0 : c * std::exp(-t);
    return -half_q * (log_two_pi_tau + t) - quad + log_unnormalized_mixing_density(family, t) + t - log_z;
  };
  try {
    return integrate_exp_over_line(log_f, kDensityTol).log_value;
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "marginal_prior_density(" << family.to_string() << ", tau=" << tau << ", q=" << q
       << ", radius=" << radius << "): " << e.what();
    throw NumericalError(os.str());
  }
}

std::optional<double> marginal_prior_density(const MixingFamily& family, double tau, int q, double radius) {
  const double lg = log_marginal_prior_density(family, tau, q, radius);
  if (std::isinf(lg) && lg > 0.0) return std::nullopt;
  return std::exp(lg);
}

double draw_mixing(const MixingFamily& f, Rng& rng) {
  switch (f.kind()) {
    case FamilyKind::StudentT:
      return rng.inverse_gamma(f.a(), f.a());
    case FamilyKind::TPBN:
    case FamilyKind::Horseshoe:
    case FamilyKind::NEG: {
      const double zeta = rng.gamma(f.a(), 1.0);
      return rng.gamma(f.u(), zeta);
    }
    case FamilyKind::GDP: {
      const double lambda = rng.gamma(2.0 * f.a(), f.eta());
      return rng.exponential(0.5 * lambda * lambda);
    }
    case FamilyKind::HIB: {
      // Rejection from TPBN(u, a); the weight is bounded by max(1, e^{-s}) max(1, 1/phi2).
      const double bound = std::max(1.0, std::exp(-f.s())) * std::max(1.0, 1.0 / f.phi2());
      for (;;) {
        const double zeta = rng.gamma(f.a(), 1.0);
        const double xi = rng.gamma(f.u(), zeta);
        const double w = 1.0 / (1.0 + xi);
        const double weight = std::exp(-f.s() * w) / (f.phi2() + (1.0 - f.phi2()) * w);
        if (rng.uniform() * bound <= weight) return xi;
      }
    }
    case FamilyKind::HorseshoePlus: {
      // xi = (C1 C2)^2 with C1, C2 independent half-Cauchy.
      const double c1 = std::tan(0.5 * std::numbers::pi * rng.uniform());
      const double c2 = std::tan(0.5 * std::numbers::pi * rng.uniform());
      const double lambda = c1 * c2;
      return lambda * lambda;
    }
  }
  return 1.0;
}

double default_tau(long n, long p) {
  if (n < 2) throw DomainError("default_tau requires n >= 2");
  if (p < 1) throw DomainError("default_tau requires p >= 1");
  const double nd = static_cast<double>(n);
  return 1.0 / (static_cast<double>(p) * std::sqrt(nd * std::log(nd)));
}

double theoretical_tau_max(double a_n, long p, double r, double u_prime) {
  if (!(r > 1.0)) throw DomainError("theoretical_tau_max requires r > 1");
  if (!(a_n > 0.0) || p < 1 || !(u_prime > 0.0)) {
    throw DomainError("theoretical_tau_max requires a_n > 0, p >= 1, u' > 0");
  }
  return a_n * a_n * std::pow(static_cast<double>(p), -(1.0 + u_prime) / (r - 1.0));
}

GlobalScale GlobalScale::fixed(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("global scale tau must be positive");
  GlobalScale g;
  g.value_ = tau;
  return g;
}

double GlobalScale::resolve(long n, long p) const { return value_ ? *value_ : default_tau(n, p); }

std::string GlobalScale::to_string() const {
  if (!value_) return "auto";
  std::ostringstream os;
  os.precision(17);
  os << *value_;
  return os.str();
}

}  // namespace embsp
