#include "embsp/gig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "embsp/errors.hpp"
#include "embsp/rng.hpp"

namespace embsp {
namespace {

// log of the unnormalized standard density x^{lambda-1} exp(-omega/2 (x + 1/x)), halved.
double half_log_density(double x, double t, double s) { return t * std::log(x) - s * (x + 1.0 / x); }

double rou_noshift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_standard_mode(lambda, omega);
  const double nc = half_log_density(xm, t, s);
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= half_log_density(x, t, s) - nc) return x;
  }
}

double rou_shift(double lambda, double omega, Rng& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_standard_mode(lambda, omega);
  const double nc = half_log_density(xm, t, s);

  // Extremes of (x - xm) sqrt(f(x)) are the roots of x^3 + a x^2 + b x + c.
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double fi = std::acos(-0.5 * q * std::sqrt(-27.0 / (p * p * p)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double x_plus = fak * std::cos(fi / 3.0) - a / 3.0;
  const double x_minus = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;
  const double u_plus = (x_plus - xm) * std::exp(half_log_density(x_plus, t, s) - nc);
  const double u_minus = (x_minus - xm) * std::exp(half_log_density(x_minus, t, s) - nc);
  for (;;) {
    const double u = u_minus + rng.uniform() * (u_plus - u_minus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x <= 0.0) continue;
    if (std::log(v) <= half_log_density(x, t, s) - nc) return x;
  }
}

// 0 <= lambda < 1, omega <= 0.2 (non-T-concave region).
double envelope_small_omega(double lambda, double omega, Rng& rng) {
  const double xm = gig_standard_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  const double area0 = k0 * x0;
  double k1 = 0.0;
  double area1 = 0.0;
  double k2 = 0.0;
  double area2 = 0.0;
  if (x0 >= 2.0 / omega) {
    k2 = std::pow(x0, lambda - 1.0);
    area2 = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    area1 = lambda == 0.0 ? k1 * std::log(2.0 / (omega * omega))
                          : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    area2 = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = area0 + area1 + area2;
  for (;;) {
    double v = total * rng.uniform();
    double x = 0.0;
    double hx = 0.0;
    if (v <= area0) {
      x = x0 * v / area0;
      hx = k0;
    } else if ((v -= area0) <= area1) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + lambda / k1 * v, 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= area1;
      const double start = std::max(x0, 2.0 / omega);
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * start) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

}  // namespace

double gig_standard_mode(double lambda, double omega) {
  if (lambda >= 1.0) return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

double sample_gig(double lambda, double psi, double chi, Rng& rng) {
  if (!std::isfinite(lambda) || !(psi >= 0.0) || !(chi >= 0.0) || !std::isfinite(psi) || !std::isfinite(chi)) {
    std::ostringstream os;
    os << "sample_gig: invalid parameters (lambda=" << lambda << ", psi=" << psi << ", chi=" << chi << ")";
    throw DomainError(os.str());
  }
  if (chi == 0.0) {
    if (lambda > 0.0 && psi > 0.0) return rng.gamma(lambda, 0.5 * psi);
    throw DomainError("sample_gig: chi = 0 requires lambda > 0 and psi > 0");
  }
  if (psi == 0.0) {
    if (lambda < 0.0) return rng.inverse_gamma(-lambda, 0.5 * chi);
    throw DomainError("sample_gig: psi = 0 requires lambda < 0");
  }

  const double omega = std::sqrt(psi * chi);
  const double alpha = std::sqrt(chi / psi);
  const bool flip = lambda < 0.0;
  const double lam = std::abs(lambda);

  double x;
  if (lam > 2.0 || omega > 3.0) {
    x = rou_shift(lam, omega, rng);
  } else if (lam >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    x = rou_noshift(lam, omega, rng);
  } else {
    x = envelope_small_omega(lam, omega, rng);
  }
  return flip ? alpha / x : alpha * x;
}

}  // namespace embsp
