#include "embsp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include "embsp/errors.hpp"

namespace embsp {
namespace {

constexpr double kSearchRadius = 90.0;
constexpr double kGridStep = 0.5;

struct CountingLog {
  const std::function<double(double)>& f;
  long& count;
  double operator()(double t) const {
    ++count;
    const double v = f(t);
    // exp(t) over/underflows past |t| ~ 709; integrands there are treated as zero.
    if (std::isnan(v) && std::abs(t) > 700.0) return -std::numeric_limits<double>::infinity();
    if (std::isnan(v)) {
      std::ostringstream os;
      os << "integrate_exp: integrand log is NaN at t=" << t;
      throw NumericalError(os.str());
    }
    return v;
  }
};

// Integral of exp(g(peak + dir*s) - shift) for s in [0, length).
double integrate_side(const CountingLog& g, double peak, double shift, double dir, double length,
                      double rel_tol, double& error) {
  auto f = [&](double s) {
    const double v = std::exp(g(peak + dir * s) - shift);
    return std::isfinite(v) ? v : 0.0;
  };
  double l1 = 0.0;
  std::size_t levels = 0;
  error = 0.0;
  if (length <= 0.0) return 0.0;
  if (std::isinf(length)) {
    boost::math::quadrature::exp_sinh<double> rule(12);
    return rule.integrate(f, 0.0, std::numeric_limits<double>::infinity(), rel_tol, &error, &l1, &levels);
  }
  boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule.integrate(f, 0.0, length, rel_tol, &error, &l1, &levels);
}

}  // namespace

LogIntegral integrate_exp(const std::function<double(double)>& log_f, double lower, double upper,
                          double rel_tol, std::optional<double> peak_hint) {
  LogIntegral out;
  if (!(upper > lower)) return out;
  CountingLog g{log_f, out.evaluations};

  const double lo = std::max(lower, -kSearchRadius);
  const double hi = std::min(upper, kSearchRadius);
  double best_t = std::isfinite(lower) ? lower : (std::isfinite(upper) ? upper : 0.0);
  double best_v = -std::numeric_limits<double>::infinity();
  bool hinted = false;
  if (peak_hint && *peak_hint > lower && *peak_hint < upper) {
    best_t = *peak_hint;
    best_v = g(best_t);
    hinted = std::isfinite(best_v);
  }
  if (hinted) {
    // Peak supplied by the caller.
  } else if (hi > lo) {
    const int steps = static_cast<int>(std::ceil((hi - lo) / kGridStep));
    for (int i = 0; i <= steps; ++i) {
      const double t = std::min(hi, lo + i * kGridStep);
      const double v = g(t);
      if (v > best_v) {
        best_v = v;
        best_t = t;
      }
    }
  } else {
    best_t = lo;
    best_v = g(lo);
  }
  if (!(best_v > -std::numeric_limits<double>::infinity())) return out;

  const double a = std::max(lo, best_t - kGridStep);
  const double b = std::min(hi, best_t + kGridStep);
  if (!hinted && b > a) {
    auto neg = [&](double t) {
      const double v = g(t);
      return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
    };
    const auto [t_min, f_min] = boost::math::tools::brent_find_minima(neg, a, b, 40);
    if (-f_min > best_v) {
      best_v = -f_min;
      best_t = t_min;
    }
  }
  if (std::isinf(best_v)) {
    throw NumericalError("integrate_exp: integrand is infinite at its peak");
  }

  double err_right = 0.0;
  double err_left = 0.0;
  const double right = integrate_side(g, best_t, best_v, +1.0, upper - best_t, rel_tol, err_right);
  const double left = integrate_side(g, best_t, best_v, -1.0, best_t - lower, rel_tol, err_left);
  const double total = right + left;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("integrate_exp: quadrature produced a non-positive or non-finite value");
  }
  out.log_value = best_v + std::log(total);
  out.relative_error = (err_right + err_left) / total;
  if (out.relative_error > rel_tol) {
    std::ostringstream os;
    os << "integrate_exp: relative error " << out.relative_error << " exceeds tolerance " << rel_tol
       << " (peak at t=" << best_t << ")";
    throw NumericalError(os.str());
  }
  return out;
}

}  // namespace embsp
