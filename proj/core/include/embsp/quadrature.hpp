#pragma once

#include <functional>
#include <limits>
#include <optional>

namespace embsp {

/// Result of integrating a positive function known only through its logarithm.
struct LogIntegral {
  double log_value = -std::numeric_limits<double>::infinity();
  /// Estimated error divided by the integral.
  double relative_error = 0.0;
  /// Integrand evaluations spent.
  long evaluations = 0;
};

/// Integrates exp(log_f(t)) over (lower, upper); either limit may be infinite.
///
/// The integrand is located by a coarse grid scan of [max(lower,-90), min(upper,90)]
/// followed by Brent refinement, rescaled by its peak, and integrated on each
/// side of the peak with double-exponential rules (exp-sinh on infinite sides,
/// tanh-sinh on finite ones). Suited to smooth, unimodal-ish integrands written
/// on a log scale. Throws NumericalError when the achieved relative error
/// exceeds `rel_tol` or a non-finite value appears. A known peak location
/// may be passed in `peak_hint` to skip the scan.
LogIntegral integrate_exp(const std::function<double(double)>& log_f, double lower, double upper,
                          double rel_tol, std::optional<double> peak_hint = std::nullopt);

/// Same as integrate_exp over the whole real line.
inline LogIntegral integrate_exp_over_line(const std::function<double(double)>& log_f, double rel_tol,
                                           std::optional<double> peak_hint = std::nullopt) {
  const double inf = std::numeric_limits<double>::infinity();
  return integrate_exp(log_f, -inf, inf, rel_tol, peak_hint);
}

}  // namespace embsp
